//! Sampling estimate of the smallest eigenvalue of `P(x)` over a region.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::numeric::eigenvalues;
use crate::poly::{rat_to_f64, PolyMatrix, Polynomial};
use crate::Error;

/// Box `[lower, upper]` intersected with `{g_j(x) >= 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub constraints: Vec<Polynomial>,
}

impl Region {
    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        Self { lower, upper, constraints: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub min_eig: f64,
    pub argmin: Vec<f64>,
    pub accepted: usize,
}

/// Polynomial with float coefficients, for repeated evaluation.
struct FloatPoly(Vec<(Vec<u32>, f64)>);

impl FloatPoly {
    fn new(p: &Polynomial) -> Self {
        FloatPoly(p.terms().map(|(m, c)| (m.0.clone(), rat_to_f64(c))).collect())
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.0.iter().map(|(e, c)| c * e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product::<f64>()).sum()
    }
}

struct Compiled {
    m: usize,
    entries: Vec<(usize, usize, FloatPoly)>,
    constraints: Vec<FloatPoly>,
}

impl Compiled {
    fn min_eig(&self, x: &[f64]) -> f64 {
        let mut a = vec![vec![0.0; self.m]; self.m];
        for (i, j, p) in &self.entries {
            let v = p.eval(x);
            a[*i][*j] = v;
            a[*j][*i] = v;
        }
        eigenvalues(&a)[0]
    }

    fn inside(&self, x: &[f64], r: &Region) -> bool {
        x.iter().zip(&r.lower).all(|(v, l)| v >= l)
            && x.iter().zip(&r.upper).all(|(v, u)| v <= u)
            && self.constraints.iter().all(|g| g.eval(x) >= 0.0)
    }
}

/// Rejection sampling in the box followed by a coordinate-descent polish of
/// the best point (200 steps). Deterministic for a given seed.
pub fn sample_min_eig(p: &PolyMatrix, region: &Region, samples: usize, seed: u64) -> Result<SampleReport, Error> {
    let n = p.nvars();
    if region.lower.len() != n || region.upper.len() != n {
        return Err(Error::Dimension(format!("region box must have {n} coordinates")));
    }
    if region.lower.iter().zip(&region.upper).any(|(l, u)| !(l <= u) || !l.is_finite() || !u.is_finite()) {
        return Err(Error::Precondition("region box is empty or unbounded".into()));
    }
    if p.order() == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let c = Compiled {
        m: p.order(),
        entries: p.entries().map(|(&(i, j), e)| (i, j, FloatPoly::new(e))).collect(),
        constraints: region.constraints.iter().map(FloatPoly::new).collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut accepted = 0;
    let mut x = vec![0.0; n];
    for _ in 0..samples {
        for (k, v) in x.iter_mut().enumerate() {
            *v = if region.lower[k] == region.upper[k] {
                region.lower[k]
            } else {
                rng.gen_range(region.lower[k]..=region.upper[k])
            };
        }
        if !c.inside(&x, region) {
            continue;
        }
        accepted += 1;
        let e = c.min_eig(&x);
        if best.as_ref().is_none_or(|(b, _)| e < *b) {
            best = Some((e, x.clone()));
        }
    }
    let (mut val, mut pt) =
        best.ok_or_else(|| Error::Precondition("no sample satisfied the region constraints".into()))?;
    let width = region.lower.iter().zip(&region.upper).map(|(l, u)| u - l).fold(0.0, f64::max);
    let mut h = 0.05 * width;
    for step in 0..200 {
        let k = step % n;
        let mut moved = false;
        for dir in [1.0, -1.0] {
            let mut y = pt.clone();
            y[k] += dir * h;
            if c.inside(&y, region) {
                let e = c.min_eig(&y);
                if e < val {
                    val = e;
                    pt = y;
                    moved = true;
                    break;
                }
            }
        }
        if !moved && k == n - 1 {
            h *= 0.5;
        }
    }
    Ok(SampleReport { min_eig: val, argmin: pt, accepted })
}
