//! Generators for the worked examples and the two scalable families.

use crate::certificate::Region;
use crate::graph::Clique;
use crate::poly::{fmt_rational, parse_polynomial, PolyMatrix, Polynomial, Rational};
use crate::sos::ParamPolyMatrix;
use crate::Error;

fn build(m: usize, n: usize, upper: &[((usize, usize), String)]) -> PolyMatrix {
    let refs: Vec<((usize, usize), &str)> = upper.iter().map(|(k, s)| (*k, s.as_str())).collect();
    PolyMatrix::from_strings(m, n, &refs).expect("generator produces valid expressions")
}

/// Univariate 3x3 matrix `F F' + k I`.
pub fn example_31(k: &Rational) -> PolyMatrix {
    let k = format!("({})", fmt_rational(k));
    build(
        3,
        1,
        &[
            ((0, 0), format!("{k} + 1 + x1^2")),
            ((0, 1), "x1 + x1^2".into()),
            ((1, 1), format!("{k} + 2*x1^2")),
            ((1, 2), "x1 - x1^2".into()),
            ((2, 2), format!("{k} + 1 + x1^2")),
        ],
    )
}

/// Positive semidefinite but not SOS matrix in three variables.
pub fn example_32() -> PolyMatrix {
    build(
        3,
        3,
        &[
            ((0, 0), "x1^2 + x2^2".into()),
            ((0, 1), "-x1*x2".into()),
            ((1, 1), "x2^2 + x3^2".into()),
            ((1, 2), "-x2*x3".into()),
            ((2, 2), "x1^2 + x3^2".into()),
        ],
    )
}

/// Even, homogeneous quartic matrix.
pub fn example_33() -> PolyMatrix {
    build(
        3,
        2,
        &[
            ((0, 0), "x1^4 + x1^2*x2^2 + x2^4".into()),
            ((0, 1), "x1^2*x2^2".into()),
            ((1, 1), "x1^4 + x2^4".into()),
            ((1, 2), "x1^2*x2^2".into()),
            ((2, 2), "x1^4 + x1^2*x2^2 + x2^4".into()),
        ],
    )
}

/// Positive definite on the bow-tie set only.
pub fn example_34() -> PolyMatrix {
    build(
        3,
        2,
        &[
            ((0, 0), "1 + 2*x1^2 - x1^4".into()),
            ((0, 1), "x1 + x1*x2 - x1^3".into()),
            ((1, 1), "3 + 4*x1^2 - 3*x2^2".into()),
            ((1, 2), "2*x1^2*x2 - x1*x2 - 2*x2^3".into()),
            ((2, 2), "1 + x2^2 + x1^2*x2^2 - x2^4".into()),
        ],
    )
}

/// `g1 = 1 - x1^2`, `g2 = x1^2 - x2^2`.
pub fn bowtie_weights() -> Vec<Polynomial> {
    vec![parse_polynomial("1 - x1^2", 2).unwrap(), parse_polynomial("x1^2 - x2^2", 2).unwrap()]
}

pub fn bowtie_region() -> Region {
    Region { lower: vec![-1.0, -1.0], upper: vec![1.0, 1.0], constraints: bowtie_weights() }
}

/// Even matrix whose Polya coefficients are never all PSD.
pub fn remark_polya() -> PolyMatrix {
    build(
        3,
        2,
        &[
            ((0, 0), "x2^4 + x1^2*x2^2".into()),
            ((0, 1), "x1^2*x2^2".into()),
            ((1, 1), "2*x1^4".into()),
            ((1, 2), "x1^2*x2^2".into()),
            ((2, 2), "x2^4 + x1^2*x2^2".into()),
        ],
    )
}

/// Consecutive pairs `{k, k+1}` of an `m`-vertex path.
pub fn chain_cliques(m: usize) -> Vec<Clique> {
    (0..m.saturating_sub(1)).map(|k| Clique::new(vec![k, k + 1])).collect()
}

/// `{1, k}` for `k = 2..m`.
pub fn arrow_cliques(m: usize) -> Vec<Clique> {
    (1..m).map(|k| Clique::new(vec![0, k])).collect()
}

/// Tridiagonal `3w x 3w` quartic family `P(x, lambda)` with cost `c' lambda`.
pub fn example_35_with_cost(omega: usize, cost: [f64; 2]) -> Result<ParamPolyMatrix, Error> {
    if omega == 0 {
        return Err(Error::Precondition("omega must be at least 1".into()));
    }
    let m = 3 * omega;
    let n = 3;
    let p = |s: &str| parse_polynomial(s, n).unwrap();
    let mut base = PolyMatrix::zeros(m, n);
    let mut d1 = PolyMatrix::zeros(m, n);
    let mut d2 = PolyMatrix::zeros(m, n);
    for i in 0..m {
        // (lambda_2 part, constant part) of the diagonal.
        let (lam, rest) = match i % 3 {
            0 => ("x1^4", "x2^4"),
            1 => ("x2^4", "x3^4"),
            _ => ("x3^4", "x1^4"),
        };
        d2.set(i, i, p(lam));
        base.set(i, i, p(rest));
    }
    for e in 1..m {
        let mono = match e % 3 {
            1 => "x1^2*x2^2",
            2 => "x2^2*x3^2",
            _ => "x1^2*x3^2",
        };
        let target = if e % 2 == 1 { &mut d1 } else { &mut d2 };
        target.set(e - 1, e, p(mono));
    }
    ParamPolyMatrix::new(base, vec![d1, d2], cost.to_vec())
}

/// The family with the cost `lambda_2 - 10 lambda_1`.
pub fn example_35(omega: usize) -> Result<ParamPolyMatrix, Error> {
    example_35_with_cost(omega, [-10.0, 1.0])
}

/// Arrow matrix `P(x)`; `m >= 2`.
pub fn example_36_matrix(m: usize) -> Result<PolyMatrix, Error> {
    if m < 2 {
        return Err(Error::Precondition("m must be at least 2".into()));
    }
    let n = 2;
    let diag = parse_polynomial("10 + x2^3 - x1^4", n)?;
    let arm = parse_polynomial("x1 + x1*x2 - x1^3", n)?;
    let mut p = PolyMatrix::zeros(m, n);
    for i in 0..m {
        p.set(i, i, diag.clone());
        if i > 0 {
            p.set(0, i, arm.clone());
        }
    }
    Ok(p)
}

/// `P(x) - lambda I` with cost `-lambda`; the bound is minus the optimum.
pub fn example_36(m: usize) -> Result<ParamPolyMatrix, Error> {
    let p = example_36_matrix(m)?;
    let minus_id = PolyMatrix::identity(m, 2).scale(&Rational::from_integer((-1).into()));
    ParamPolyMatrix::new(p, vec![minus_id], vec![-1.0])
}

/// `m x m` embedding of the `k = 1` matrix on rows `{1, 2, r+1}` with unit
/// diagonal elsewhere; needs `2 <= r < m`.
pub fn nondecomposable_family(m: usize, r: usize) -> Result<PolyMatrix, Error> {
    if r < 2 || r >= m {
        return Err(Error::Precondition(format!("need 2 <= r < m, got r = {r}, m = {m}")));
    }
    let n = 1;
    let mut p = PolyMatrix::identity(m, n);
    let q = |s: &str| parse_polynomial(s, n).unwrap();
    p.set(0, 0, q("2 + x1^2"));
    p.set(0, 1, q("x1 + x1^2"));
    p.set(1, 1, q("2*x1^2 + 1"));
    p.set(1, r, q("x1 - x1^2"));
    p.set(r, r, q("2 + x1^2"));
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn example_35_shape() {
        let p = example_35(2).unwrap();
        assert_eq!(p.order(), 6);
        assert_eq!(p.directions[0].entry(0, 1), parse_polynomial("x1^2*x2^2", 3).unwrap());
        assert_eq!(p.directions[1].entry(1, 2), parse_polynomial("x2^2*x3^2", 3).unwrap());
        assert_eq!(p.directions[0].entry(2, 3), parse_polynomial("x1^2*x3^2", 3).unwrap());
        // 3w = 6 is even, so the last coupling carries lambda_1.
        assert_eq!(p.directions[0].entry(4, 5), parse_polynomial("x2^2*x3^2", 3).unwrap());
        assert_eq!(p.base.entry(2, 2), parse_polynomial("x1^4", 3).unwrap());
        assert_eq!(p.homogeneous_half_degree(), Some(2));
        let odd = example_35(1).unwrap();
        assert_eq!(odd.directions[1].entry(1, 2), parse_polynomial("x2^2*x3^2", 3).unwrap());
    }

    #[test]
    fn example_31_matches_factor_form() {
        let p = example_31(&rat(1));
        assert_eq!(p, nondecomposable_family(3, 2).unwrap());
    }

    #[test]
    fn arrow_and_chain() {
        let p = example_36_matrix(4).unwrap();
        assert_eq!(p.sparsity_graph().num_edges(), 3);
        assert_eq!(arrow_cliques(4).len(), 3);
        assert_eq!(chain_cliques(4), vec![Clique::new(vec![0, 1]), Clique::new(vec![1, 2]), Clique::new(vec![2, 3])]);
    }
}
