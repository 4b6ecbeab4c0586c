//! Gram matrices pinned down by coefficient matching alone.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::MonomialBasis;
use crate::poly::{Monomial, PolyMatrix, Rational};
use crate::Error;

/// Solves the matching equations of a dense Gram representation of `P` by
/// repeated substitution. Besides single-unknown equations, a zero diagonal
/// entry forces its whole row to zero (as any PSD solution must have).
/// Fails if some entry stays undetermined or an equation is violated.
pub fn forced_gram(p: &PolyMatrix, basis: &MonomialBasis) -> Result<Vec<Vec<Rational>>, Error> {
    let m = p.order();
    let nb = basis.len();
    let size = m * nb;
    // Equations: coefficient list over unknowns (u <= v) and right-hand side.
    let mut eqs: BTreeMap<(usize, usize, Monomial), (BTreeMap<(usize, usize), Rational>, Rational)> = BTreeMap::new();
    for a in 0..m {
        for b in a..m {
            for s in 0..nb {
                for t in 0..nb {
                    let (u, v) = (a * nb + s, b * nb + t);
                    if a == b && t < s {
                        continue;
                    }
                    let c = if a == b && s != t {
                        Rational::from_integer(2.into())
                    } else {
                        Rational::from_integer(1.into())
                    };
                    let mono = basis.monomials[s].mul(&basis.monomials[t]);
                    let e = eqs.entry((a, b, mono)).or_insert_with(|| (BTreeMap::new(), Rational::zero()));
                    *e.0.entry((u.min(v), u.max(v))).or_insert_with(Rational::zero) += c;
                }
            }
        }
    }
    for (&(a, b), e) in p.entries() {
        for (mono, c) in e.terms() {
            let key = (a, b, mono.clone());
            match eqs.get_mut(&key) {
                Some(eq) => eq.1 += c,
                None => {
                    return Err(Error::StructurallyInfeasible(format!(
                        "monomial {mono} of entry ({}, {}) is not reachable from the basis",
                        a + 1,
                        b + 1
                    )))
                }
            }
        }
    }
    let mut known: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    loop {
        let mut changed = false;
        for u in 0..size {
            if known.get(&(u, u)).is_some_and(Zero::is_zero) {
                for v in 0..size {
                    let key = (u.min(v), u.max(v));
                    if !known.contains_key(&key) {
                        known.insert(key, Rational::zero());
                        changed = true;
                    }
                }
            }
        }
        for (key, (coeffs, rhs)) in &eqs {
            let mut rest = rhs.clone();
            let mut unknown = Vec::new();
            for (var, c) in coeffs {
                match known.get(var) {
                    Some(v) => rest -= c * v,
                    None => unknown.push((*var, c)),
                }
            }
            match unknown.as_slice() {
                [] if !rest.is_zero() => {
                    return Err(Error::StructurallyInfeasible(format!(
                        "coefficient of {} in entry ({}, {}) cannot be matched",
                        key.2,
                        key.0 + 1,
                        key.1 + 1
                    )))
                }
                [(var, c)] => {
                    known.insert(*var, rest / *c);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    let mut g = vec![vec![Rational::zero(); size]; size];
    for u in 0..size {
        for v in u..size {
            let val = known.get(&(u, v)).ok_or_else(|| {
                Error::Precondition(format!("Gram entry ({}, {}) is not determined by matching", u + 1, v + 1))
            })?;
            g[u][v] = val.clone();
            g[v][u] = val.clone();
        }
    }
    Ok(g)
}
