//! Homogeneous self-dual interior-point method with Nesterov-Todd scaling.
//!
//! Internally the solver works on the equality-form pair
//!
//! ```text
//! (P)  min <C,X> + cf'w   s.t.  <A_i,X> + (G w)_i = b_i,  X >= 0
//! (D)  max b'y            s.t.  sum_i y_i A_i + S = C,  G'y = cf,  S >= 0
//! ```
//!
//! with `C = F0`, `A_i = F_i`, and the LMI variable equal to `-y`. The
//! embedding adds `tau` and `kappa`; a vanishing `tau` yields a Farkas ray.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::linalg::{cholesky, congruence, frob_dot, frob_norm_sq, svd, sym_eigenvalues, symmetrize};
use crate::problem::{Block, DenseSym, SdpProblem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    /// Relative diagonal shift added to the Schur complement.
    pub regularization: f64,
    pub verbose: bool,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 200, step_fraction: 0.98, regularization: 1e-12, verbose: false }
    }
}

/// Outcome, named after the LMI (SDPA primal) side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SdpStatus {
    Optimal,
    /// The LMI has no feasible `y`; `dual_blocks` holds the Farkas ray.
    PrimalInfeasible,
    /// The equality-form side is infeasible; `y` holds the Farkas ray.
    DualInfeasible,
    /// Iteration cap reached or progress stalled; the solution holds the
    /// iterate with the smallest residuals.
    MaxIterations,
    NumericalFailure,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KktResiduals {
    /// `||F(y) - S|| / (1 + ||F0||)` for the LMI.
    pub primal: f64,
    /// `||<F_i,Z> + F_i.w - b_i|| / (1 + ||b||)`.
    pub dual: f64,
    /// Relative duality gap.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub y: Vec<f64>,
    /// Dual matrix `Z`, one dense block per problem block (diagonal blocks
    /// are returned as dense diagonal matrices).
    pub dual_blocks: Vec<DenseSym>,
    /// Dual values of the free segment.
    pub dual_free: Vec<f64>,
    /// `b'y`.
    pub primal_objective: f64,
    /// `-<F0, Z> - F0.w`.
    pub dual_objective: f64,
    pub residuals: KktResiduals,
    pub iterations: usize,
    /// Violation of the normalized Farkas conditions for infeasible statuses.
    pub farkas_violation: Option<f64>,
}

/// Internal cone block: dense PSD of a given order.
struct Data {
    sizes: Vec<usize>,
    /// For each internal block, `(user block, diagonal index)` for LP entries.
    origin: Vec<(usize, Option<usize>)>,
    /// Per block: constraint index and its entries with both triangles.
    rows: Vec<Vec<(usize, Vec<(usize, usize, f64)>)>>,
    c: Vec<Mat<f64>>,
    cf: Vec<f64>,
    /// Per constraint: free coefficients.
    g: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    m: usize,
    f: usize,
}

impl Data {
    fn new(p: &SdpProblem) -> Self {
        let mut sizes = Vec::new();
        let mut origin = Vec::new();
        let mut first = Vec::with_capacity(p.blocks.len());
        for (ub, blk) in p.blocks.iter().enumerate() {
            first.push(sizes.len());
            match *blk {
                Block::Psd(n) => {
                    sizes.push(n);
                    origin.push((ub, None));
                }
                Block::Diag(n) => {
                    for i in 0..n {
                        sizes.push(1);
                        origin.push((ub, Some(i)));
                    }
                }
            }
        }
        let locate = |b: usize, r: usize, c: usize| -> (usize, usize, usize) {
            match p.blocks[b] {
                Block::Psd(_) => (first[b], r, c),
                Block::Diag(_) => (first[b] + r, 0, 0),
            }
        };
        let nb = sizes.len();
        let mut c: Vec<Mat<f64>> = sizes.iter().map(|&n| Mat::zeros(n, n)).collect();
        for &(b, r, col, v) in &p.f0.entries {
            let (k, r, col) = locate(b, r, col);
            c[k][(r, col)] += v;
            if r != col {
                c[k][(col, r)] += v;
            }
        }
        let mut cf = vec![0.0; p.free_vars];
        for &(i, v) in &p.f0.free {
            cf[i] += v;
        }
        let mut rows: Vec<Vec<(usize, Vec<(usize, usize, f64)>)>> = vec![Vec::new(); nb];
        let mut g = Vec::with_capacity(p.constraints.len());
        for (i, f) in p.constraints.iter().enumerate() {
            for &(b, r, col, v) in &f.entries {
                let (k, r, col) = locate(b, r, col);
                let list = &mut rows[k];
                if list.last().map(|e| e.0) != Some(i) {
                    list.push((i, Vec::new()));
                }
                let ent = &mut list.last_mut().unwrap().1;
                ent.push((r, col, v));
                if r != col {
                    ent.push((col, r, v));
                }
            }
            g.push(f.free.clone());
        }
        Self { sizes, origin, rows, c, cf, g, b: p.objective.clone(), m: p.constraints.len(), f: p.free_vars }
    }

    fn nu(&self) -> f64 {
        self.sizes.iter().sum::<usize>() as f64
    }

    /// `(<A_i, X>)_i`.
    fn apply_a(&self, x: &[Mat<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (k, list) in self.rows.iter().enumerate() {
            for (i, ent) in list {
                let mut s = 0.0;
                for &(r, c, v) in ent {
                    s += v * x[k][(r, c)];
                }
                out[*i] += s;
            }
        }
        out
    }

    /// `sum_i y_i A_i`.
    fn apply_at(&self, y: &[f64]) -> Vec<Mat<f64>> {
        let mut out: Vec<Mat<f64>> = self.sizes.iter().map(|&n| Mat::zeros(n, n)).collect();
        for (k, list) in self.rows.iter().enumerate() {
            for (i, ent) in list {
                let yi = y[*i];
                if yi == 0.0 {
                    continue;
                }
                for &(r, c, v) in ent {
                    out[k][(r, c)] += yi * v;
                }
            }
        }
        out
    }

    fn apply_g(&self, w: &[f64]) -> Vec<f64> {
        self.g.iter().map(|row| row.iter().map(|&(l, v)| v * w[l]).sum()).collect()
    }

    fn apply_gt(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.f];
        for (i, row) in self.g.iter().enumerate() {
            for &(l, v) in row {
                out[l] += v * y[i];
            }
        }
        out
    }
}

/// NT scaling of one block: `X = R L R'`, `S = R^-T L R^-1`, `W = R R'`.
struct Scaling {
    r: Mat<f64>,
    rinv: Mat<f64>,
    lambda: Vec<f64>,
    w: Mat<f64>,
}

impl Scaling {
    fn identity(n: usize) -> Self {
        Self { r: Mat::identity(n, n), rinv: Mat::identity(n, n), lambda: vec![1.0; n], w: Mat::identity(n, n) }
    }

    /// Moves the scaling to `Lambda + a dZ` and `Lambda + a dS` (scaled space).
    fn update(&mut self, dz: &Mat<f64>, ds: &Mat<f64>, alpha: f64) -> Option<()> {
        let n = self.lambda.len();
        let sq: Vec<f64> = self.lambda.iter().map(|l| l.sqrt()).collect();
        let factor = |d: &Mat<f64>| -> Option<Mat<f64>> {
            // chol(L^-1/2 (L + a d) L^-1/2), then rescale rows by L^1/2.
            let t = Mat::<f64>::from_fn(n, n, |i, j| {
                let base = if i == j { 1.0 } else { 0.0 };
                base + alpha * d[(i, j)] / (sq[i] * sq[j])
            });
            let mut t = t;
            symmetrize(&mut t);
            let l = cholesky(&t)?;
            Some(Mat::from_fn(n, n, |i, j| sq[i] * l[(i, j)]))
        };
        let l1 = factor(dz)?;
        let l2 = factor(ds)?;
        let prod = l2.transpose() * &l1;
        let (u, s, v) = svd(&prod)?;
        if s.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
            return None;
        }
        let isq: Vec<f64> = s.iter().map(|x| 1.0 / x.sqrt()).collect();
        let lv = &l1 * &v;
        let right = Mat::from_fn(n, n, |i, j| lv[(i, j)] * isq[j]);
        let r = &self.r * right;
        let ul = u.transpose() * l2.transpose();
        let left = Mat::from_fn(n, n, |i, j| isq[i] * ul[(i, j)]);
        let rinv = left * &self.rinv;
        let mut w = &r * r.transpose();
        symmetrize(&mut w);
        self.r = r;
        self.rinv = rinv;
        self.lambda = s;
        self.w = w;
        Some(())
    }
}

#[derive(Clone)]
struct Iterate {
    x: Vec<Mat<f64>>,
    s: Vec<Mat<f64>>,
    y: Vec<f64>,
    w: Vec<f64>,
    tau: f64,
    kappa: f64,
}

struct Direction {
    dx: Vec<Mat<f64>>,
    ds: Vec<Mat<f64>>,
    dy: Vec<f64>,
    dw: Vec<f64>,
    dtau: f64,
    dkappa: f64,
    /// Scaled `R^-1 dX R^-T` and `R' dS R`.
    dz_hat: Vec<Mat<f64>>,
    ds_hat: Vec<Mat<f64>>,
}

struct Residuals {
    rp: Vec<f64>,
    rd: Vec<Mat<f64>>,
    rdf: Vec<f64>,
    rg: f64,
    pobj: f64,
    dobj: f64,
}

/// Factored Newton matrix `[[M, G], [G', 0]]`.
struct Kkt {
    llt: faer::linalg::solvers::Llt<f64>,
    /// `M^-1 G` and the LU of `G' M^-1 G`.
    minv_g: Mat<f64>,
    small: Option<faer::linalg::solvers::PartialPivLu<f64>>,
    gmat: Mat<f64>,
    /// Unregularized `M`, for iterative refinement.
    m: Mat<f64>,
}

impl Kkt {
    /// Solve with two rounds of iterative refinement.
    fn solve(&self, ry: &[f64], rf: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (mut dy, mut dw) = self.solve_once(ry, rf);
        for _ in 0..2 {
            let y = Mat::<f64>::from_fn(dy.len(), 1, |i, _| dy[i]);
            let w = Mat::<f64>::from_fn(dw.len(), 1, |l, _| dw[l]);
            let my = &self.m * &y + &self.gmat * &w;
            let gy = self.gmat.transpose() * &y;
            let e1: Vec<f64> = (0..ry.len()).map(|i| ry[i] - my[(i, 0)]).collect();
            let e2: Vec<f64> = (0..rf.len()).map(|l| rf[l] - gy[(l, 0)]).collect();
            let (cy, cw) = self.solve_once(&e1, &e2);
            dy.iter_mut().zip(&cy).for_each(|(a, b)| *a += b);
            dw.iter_mut().zip(&cw).for_each(|(a, b)| *a += b);
        }
        (dy, dw)
    }

    fn solve_once(&self, ry: &[f64], rf: &[f64]) -> (Vec<f64>, Vec<f64>) {
        use faer::linalg::solvers::Solve;
        let m = ry.len();
        let mut t = Mat::<f64>::from_fn(m, 1, |i, _| ry[i]);
        self.llt.solve_in_place(t.as_mut());
        let f = rf.len();
        if f == 0 {
            return ((0..m).map(|i| t[(i, 0)]).collect(), Vec::new());
        }
        let gt_t = self.gmat.transpose() * &t;
        let mut rhs = Mat::<f64>::from_fn(f, 1, |l, _| gt_t[(l, 0)] - rf[l]);
        self.small.as_ref().unwrap().solve_in_place(rhs.as_mut());
        let corr = &self.minv_g * &rhs;
        let dy = (0..m).map(|i| t[(i, 0)] - corr[(i, 0)]).collect();
        let dw = (0..f).map(|l| rhs[(l, 0)]).collect();
        (dy, dw)
    }
}

/// Iterations without halving the best merit before giving up.
const STALL_WINDOW: usize = 15;

/// Growth of the merit over its lowest value that ends a stalled run early.
const DIVERGENCE: f64 = 10.0;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves the problem. Deterministic for a given input.
pub fn solve(problem: &SdpProblem, opts: &SdpOptions) -> SdpSolution {
    faer::set_global_parallelism(faer::Par::Seq);
    let data = Data::new(problem);
    Solver { d: &data, opts, problem }.run()
}

struct Solver<'a> {
    d: &'a Data,
    opts: &'a SdpOptions,
    problem: &'a SdpProblem,
}

impl Solver<'_> {
    fn residuals(&self, it: &Iterate) -> Residuals {
        let d = self.d;
        let ax = d.apply_a(&it.x);
        let gw = d.apply_g(&it.w);
        let rp: Vec<f64> = (0..d.m).map(|i| ax[i] + gw[i] - d.b[i] * it.tau).collect();
        let aty = d.apply_at(&it.y);
        let rd: Vec<Mat<f64>> = (0..d.sizes.len())
            .map(|k| {
                let n = d.sizes[k];
                Mat::from_fn(n, n, |i, j| aty[k][(i, j)] + it.s[k][(i, j)] - d.c[k][(i, j)] * it.tau)
            })
            .collect();
        let gty = d.apply_gt(&it.y);
        let rdf: Vec<f64> = (0..d.f).map(|l| gty[l] - d.cf[l] * it.tau).collect();
        let pobj: f64 = (0..d.sizes.len()).map(|k| frob_dot(&d.c[k], &it.x[k])).sum::<f64>() + dot(&d.cf, &it.w);
        let dobj = dot(&d.b, &it.y);
        Residuals { rp, rd, rdf, rg: pobj - dobj + it.kappa, pobj, dobj }
    }

    fn schur(&self, sc: &[Scaling]) -> Mat<f64> {
        let d = self.d;
        let mut m = Mat::<f64>::zeros(d.m, d.m);
        for (k, list) in d.rows.iter().enumerate() {
            let w = &sc[k].w;
            for (a, (i, ei)) in list.iter().enumerate() {
                for (j, ej) in &list[a..] {
                    let mut s = 0.0;
                    for &(p, q, v) in ei {
                        for &(r, t, u) in ej {
                            s += v * u * w[(q, r)] * w[(t, p)];
                        }
                    }
                    m[(*i, *j)] += s;
                    if i != j {
                        m[(*j, *i)] += s;
                    }
                }
            }
        }
        m
    }

    fn factor(&self, m0: Mat<f64>) -> Option<Kkt> {
        let d = self.d;
        let mut m = m0.clone();
        let scale = (0..d.m).map(|i| m[(i, i)].abs()).fold(1.0f64, f64::max);
        let mut delta = self.opts.regularization * scale;
        let mut llt = None;
        for _ in 0..4 {
            for i in 0..d.m {
                m[(i, i)] += delta;
            }
            if let Ok(f) = m.llt(faer::Side::Lower) {
                llt = Some(f);
                break;
            }
            for i in 0..d.m {
                m[(i, i)] -= delta;
            }
            delta *= 1e3;
        }
        let llt = llt?;
        let gmat = Mat::<f64>::from_fn(d.m, d.f, |i, l| d.g[i].iter().filter(|e| e.0 == l).map(|e| e.1).sum());
        let (minv_g, small) = if d.f > 0 {
            use faer::linalg::solvers::Solve;
            let mut mg = gmat.clone();
            llt.solve_in_place(mg.as_mut());
            let sm = gmat.transpose() * &mg;
            (mg, Some(sm.partial_piv_lu()))
        } else {
            (Mat::zeros(d.m, 0), None)
        };
        Some(Kkt { llt, minv_g, small, gmat, m: m0 })
    }

    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        it: &Iterate,
        res: &Residuals,
        sc: &[Scaling],
        kkt: &Kkt,
        wcw: &[Mat<f64>],
        q: &[f64],
        cwc: f64,
        u2: &(Vec<f64>, Vec<f64>),
        den: f64,
        eta: f64,
        u: &[Mat<f64>],
        rtau: f64,
    ) -> Direction {
        let d = self.d;
        let nb = d.sizes.len();
        // T = R U R' + eta W Rd W
        let t: Vec<Mat<f64>> = (0..nb)
            .map(|k| {
                let mut a = congruence(&sc[k].r, &u[k]);
                if eta != 0.0 {
                    let b = congruence(&sc[k].w, &res.rd[k]);
                    a += b * eta;
                }
                a
            })
            .collect();
        let at = d.apply_a(&t);
        let h: Vec<f64> = (0..d.m).map(|i| -eta * res.rp[i] - at[i]).collect();
        let hf: Vec<f64> = res.rdf.iter().map(|v| -eta * v).collect();
        let (u1, v1) = kkt.solve(&h, &hf);
        let t0: f64 = (0..nb).map(|k| frob_dot(&d.c[k], &t[k])).sum();
        let qb: Vec<f64> = (0..d.m).map(|i| q[i] - d.b[i]).collect();
        let num = -eta * res.rg - t0 - dot(&qb, &u1) - dot(&d.cf, &v1) - rtau / it.tau;
        let dtau = num / den;
        let mut dy: Vec<f64> = (0..d.m).map(|i| u1[i] + dtau * u2.0[i]).collect();
        let mut dw: Vec<f64> = (0..d.f).map(|l| v1[l] + dtau * u2.1[l]).collect();
        // Refine against the operators themselves; the Schur matrix and
        // A(W A'(.) W) drift apart in floating point near the boundary.
        for _ in 0..2 {
            let aty = d.apply_at(&dy);
            let x: Vec<Mat<f64>> = (0..nb).map(|k| congruence(&sc[k].w, &aty[k]) + &t[k] - &wcw[k] * dtau).collect();
            let ax = d.apply_a(&x);
            let gw = d.apply_g(&dw);
            let e: Vec<f64> = (0..d.m).map(|i| ax[i] + gw[i] + eta * res.rp[i] - d.b[i] * dtau).collect();
            let gty = d.apply_gt(&dy);
            let ef: Vec<f64> = (0..d.f).map(|l| gty[l] + eta * res.rdf[l] - d.cf[l] * dtau).collect();
            let (ey, ew) = kkt.solve(&e, &ef);
            for i in 0..d.m {
                dy[i] -= ey[i];
            }
            for l in 0..d.f {
                dw[l] -= ew[l];
            }
        }
        let aty = d.apply_at(&dy);
        let mut dx = Vec::with_capacity(nb);
        let mut ds = Vec::with_capacity(nb);
        let mut dz_hat = Vec::with_capacity(nb);
        let mut ds_hat = Vec::with_capacity(nb);
        for k in 0..nb {
            let n = d.sizes[k];
            let mut x = congruence(&sc[k].w, &aty[k]);
            x += &t[k];
            x -= &wcw[k] * dtau;
            let s = Mat::from_fn(n, n, |i, j| -eta * res.rd[k][(i, j)] - aty[k][(i, j)] + d.c[k][(i, j)] * dtau);
            dz_hat.push(congruence(&sc[k].rinv, &x));
            ds_hat.push(congruence(&sc[k].r.transpose().to_owned(), &s));
            dx.push(x);
            ds.push(s);
        }
        let _ = cwc;
        let dkappa = (rtau - it.kappa * dtau) / it.tau;
        Direction { dx, ds, dy, dw, dtau, dkappa, dz_hat, ds_hat }
    }

    fn max_step(&self, it: &Iterate, sc: &[Scaling], dir: &Direction) -> f64 {
        let mut alpha = f64::INFINITY;
        for (k, s) in sc.iter().enumerate() {
            let n = s.lambda.len();
            let isq: Vec<f64> = s.lambda.iter().map(|l| 1.0 / l.sqrt()).collect();
            for dm in [&dir.dz_hat[k], &dir.ds_hat[k]] {
                let t = Mat::<f64>::from_fn(n, n, |i, j| dm[(i, j)] * isq[i] * isq[j]);
                let e = sym_eigenvalues(&t)[0];
                if e.is_nan() {
                    return 0.0;
                }
                if e < 0.0 {
                    alpha = alpha.min(-1.0 / e);
                }
            }
        }
        if dir.dtau < 0.0 {
            alpha = alpha.min(-it.tau / dir.dtau);
        }
        if dir.dkappa < 0.0 {
            alpha = alpha.min(-it.kappa / dir.dkappa);
        }
        alpha
    }

    fn run(&self) -> SdpSolution {
        let d = self.d;
        let nb = d.sizes.len();
        let nu = d.nu();
        let tol = self.opts.tol;
        let mut it = Iterate {
            x: d.sizes.iter().map(|&n| Mat::identity(n, n)).collect(),
            s: d.sizes.iter().map(|&n| Mat::identity(n, n)).collect(),
            y: vec![0.0; d.m],
            w: vec![0.0; d.f],
            tau: 1.0,
            kappa: 1.0,
        };
        let mut sc: Vec<Scaling> = d.sizes.iter().map(|&n| Scaling::identity(n)).collect();
        let bnorm = norm(&d.b);
        let cnorm = (d.c.iter().map(frob_norm_sq).sum::<f64>() + d.cf.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let mut stalls = 0usize;
        // Best iterate by KKT merit, returned on any non-converged exit.
        let mut best: Option<(f64, Iterate)> = None;
        // Smallest of merit and Farkas violations seen, and when it last improved.
        let mut progress = (f64::INFINITY, 0usize);
        let mut lowest = f64::INFINITY;
        let mut done = 0;

        for iter in 0..=self.opts.max_iter {
            let res = self.residuals(&it);
            let pres = norm(&res.rp) / (it.tau * (1.0 + bnorm));
            let dres = (res.rd.iter().map(frob_norm_sq).sum::<f64>() + res.rdf.iter().map(|v| v * v).sum::<f64>())
                .sqrt()
                / (it.tau * (1.0 + cnorm));
            let (po, dob) = (res.pobj / it.tau, res.dobj / it.tau);
            let gap = (po - dob).abs() / (1.0 + po.abs() + dob.abs());
            if self.opts.verbose {
                eprintln!(
                    "{iter:3} pobj {po:+.8e} dobj {dob:+.8e} pres {pres:.2e} dres {dres:.2e} gap {gap:.2e} tau {:.2e} kappa {:.2e}",
                    it.tau, it.kappa
                );
            }
            if pres <= tol && dres <= tol && gap <= tol {
                return self.finish(&it, SdpStatus::Optimal, iter, None);
            }
            let merit = pres.max(dres).max(gap);
            if best.as_ref().is_none_or(|(b, _)| merit < *b) {
                best = Some((merit, it.clone()));
            }
            let mut measure = merit;
            // Equality side infeasible: b'y > 0, sum y A + S ~ 0.
            if res.dobj > 0.0 {
                let viol = (res.rd.iter().zip(&d.c).map(|(r, c)| frob_norm_sq(&(r + c * it.tau))).sum::<f64>()
                    + d.apply_gt(&it.y).iter().map(|v| v * v).sum::<f64>())
                .sqrt()
                    / res.dobj;
                if viol <= tol {
                    return self.finish(&it, SdpStatus::DualInfeasible, iter, Some(viol));
                }
                measure = measure.min(viol);
            }
            if res.pobj < 0.0 {
                let ax = d.apply_a(&it.x);
                let gw = d.apply_g(&it.w);
                let r: Vec<f64> = ax.iter().zip(&gw).map(|(a, g)| a + g).collect();
                let viol = norm(&r) / (-res.pobj);
                if viol <= tol {
                    return self.finish(&it, SdpStatus::PrimalInfeasible, iter, Some(viol));
                }
                measure = measure.min(viol);
            }
            if measure < 0.5 * progress.0 {
                progress = (measure, iter);
            }
            lowest = lowest.min(measure);
            // Past the best point the iterates of an ill-posed problem only drift away.
            let diverging = measure > DIVERGENCE * lowest && iter >= progress.1 + 3;
            let stalled = iter >= progress.1 + STALL_WINDOW || diverging;
            if iter == self.opts.max_iter || stalled {
                done = iter;
                break;
            }

            let mu = ((0..nb).map(|k| frob_dot(&it.x[k], &it.s[k])).sum::<f64>() + it.tau * it.kappa) / (nu + 1.0);
            let Some(kkt) = self.factor(self.schur(&sc)) else {
                return self.give_up(&it, best, SdpStatus::NumericalFailure, iter);
            };
            let wcw: Vec<Mat<f64>> = (0..nb).map(|k| congruence(&sc[k].w, &d.c[k])).collect();
            let q = d.apply_a(&wcw);
            let cwc: f64 = (0..nb).map(|k| frob_dot(&d.c[k], &wcw[k])).sum();
            let bq: Vec<f64> = (0..d.m).map(|i| d.b[i] + q[i]).collect();
            let mut u2 = kkt.solve(&bq, &d.cf);
            let qb: Vec<f64> = (0..d.m).map(|i| q[i] - d.b[i]).collect();
            let mut den = dot(&qb, &u2.0) + dot(&d.cf, &u2.1) - cwc - it.kappa / it.tau;
            if !(den < 0.0) {
                // Cancellation near the optimum. Split u2 = K^-1 (q, cf) + K^-1 (b, 0)
                // so that den = -|C - A'y_q|_W^2 - b'K^-1 b - kappa/tau keeps its sign.
                let uq = kkt.solve(&q, &d.cf);
                let ub = kkt.solve(&d.b, &vec![0.0; d.f]);
                u2 = ((0..d.m).map(|i| uq.0[i] + ub.0[i]).collect(), (0..d.f).map(|l| uq.1[l] + ub.1[l]).collect());
                let aty_q = d.apply_at(&uq.0);
                let proj: f64 = (0..nb)
                    .map(|k| {
                        let ct = &d.c[k] - &aty_q[k];
                        frob_dot(&ct, &congruence(&sc[k].w, &ct))
                    })
                    .sum();
                den = -proj.max(0.0) - dot(&d.b, &ub.0).max(0.0) - it.kappa / it.tau;
            }
            if !(den < 0.0) || !den.is_finite() {
                return self.give_up(&it, best, SdpStatus::NumericalFailure, iter);
            }

            // Predictor.
            let u_aff: Vec<Mat<f64>> = sc
                .iter()
                .map(|s| {
                    let n = s.lambda.len();
                    Mat::from_fn(n, n, |i, j| if i == j { -s.lambda[i] } else { 0.0 })
                })
                .collect();
            let aff = self.direction(&it, &res, &sc, &kkt, &wcw, &q, cwc, &u2, den, 1.0, &u_aff, -it.tau * it.kappa);
            let a_aff = self.max_step(&it, &sc, &aff).min(1.0);
            let mu_aff = {
                let mut s = 0.0;
                for k in 0..nb {
                    let xa = &it.x[k] + &aff.dx[k] * a_aff;
                    let sa = &it.s[k] + &aff.ds[k] * a_aff;
                    s += frob_dot(&xa, &sa);
                }
                s += (it.tau + a_aff * aff.dtau) * (it.kappa + a_aff * aff.dkappa);
                s / (nu + 1.0)
            };
            let sigma = (mu_aff.max(0.0) / mu).powi(3).clamp(0.0, 1.0);

            // Corrector.
            let u_cor: Vec<Mat<f64>> = (0..nb)
                .map(|k| {
                    let l = &sc[k].lambda;
                    let n = l.len();
                    let p = &aff.dz_hat[k] * &aff.ds_hat[k];
                    Mat::from_fn(n, n, |i, j| {
                        let mut r = -0.5 * (p[(i, j)] + p[(j, i)]);
                        if i == j {
                            r += -l[i] * l[i] + sigma * mu;
                        }
                        2.0 * r / (l[i] + l[j])
                    })
                })
                .collect();
            let rtau = -it.tau * it.kappa + sigma * mu - aff.dtau * aff.dkappa;
            let dir = self.direction(&it, &res, &sc, &kkt, &wcw, &q, cwc, &u2, den, 1.0 - sigma, &u_cor, rtau);
            let amax = self.max_step(&it, &sc, &dir);
            let alpha = (self.opts.step_fraction * amax).min(1.0);
            if !(alpha > 0.0) {
                return self.give_up(&it, best, SdpStatus::NumericalFailure, iter);
            }
            if alpha < 1e-8 {
                stalls += 1;
                if stalls >= 5 {
                    return self.give_up(&it, best, SdpStatus::NumericalFailure, iter);
                }
            } else {
                stalls = 0;
            }

            for k in 0..nb {
                if sc[k].update(&dir.dz_hat[k], &dir.ds_hat[k], alpha).is_none() {
                    return self.give_up(&it, best, SdpStatus::NumericalFailure, iter);
                }
                it.x[k] += &dir.dx[k] * alpha;
                it.s[k] += &dir.ds[k] * alpha;
                symmetrize(&mut it.x[k]);
                symmetrize(&mut it.s[k]);
            }
            for i in 0..d.m {
                it.y[i] += alpha * dir.dy[i];
            }
            for l in 0..d.f {
                it.w[l] += alpha * dir.dw[l];
            }
            it.tau += alpha * dir.dtau;
            it.kappa += alpha * dir.dkappa;
        }
        self.give_up(&it, best, SdpStatus::MaxIterations, done)
    }

    fn give_up(&self, it: &Iterate, best: Option<(f64, Iterate)>, status: SdpStatus, iter: usize) -> SdpSolution {
        match best {
            Some((_, b)) => self.finish(&b, status, iter, None),
            None => self.finish(it, status, iter, None),
        }
    }

    fn finish(&self, it: &Iterate, status: SdpStatus, iterations: usize, viol: Option<f64>) -> SdpSolution {
        let d = self.d;
        // Scale: by tau for solutions, by the certificate objective for rays.
        let (xs, ys) = match status {
            SdpStatus::PrimalInfeasible => {
                let pobj: f64 =
                    (0..d.sizes.len()).map(|k| frob_dot(&d.c[k], &it.x[k])).sum::<f64>() + dot(&d.cf, &it.w);
                (1.0 / (-pobj), 0.0)
            }
            SdpStatus::DualInfeasible => (0.0, 1.0 / dot(&d.b, &it.y)),
            _ => (1.0 / it.tau, 1.0 / it.tau),
        };
        let y: Vec<f64> = it.y.iter().map(|v| -v * ys).collect();
        let mut dual_blocks: Vec<DenseSym> = self.problem.blocks.iter().map(|b| DenseSym::zeros(b.size())).collect();
        for (k, &(ub, diag)) in d.origin.iter().enumerate() {
            match diag {
                None => {
                    let n = d.sizes[k];
                    for i in 0..n {
                        for j in 0..n {
                            dual_blocks[ub].data[i * n + j] = it.x[k][(i, j)] * xs;
                        }
                    }
                }
                Some(i) => dual_blocks[ub].set(i, i, it.x[k][(0, 0)] * xs),
            }
        }
        let dual_free: Vec<f64> = it.w.iter().map(|v| v * xs).collect();
        let primal_objective = dot(&self.problem.objective, &y);
        let dual_objective = -self.problem.f0.dot(&dual_blocks, &dual_free);
        let residuals = kkt_residuals(self.problem, &y, &dual_blocks, &dual_free);
        SdpSolution {
            status,
            y,
            dual_blocks,
            dual_free,
            primal_objective,
            dual_objective,
            residuals,
            iterations,
            farkas_violation: viol,
        }
    }
}

/// Relative KKT residuals of a candidate pair, measured on the LMI data.
///
/// The primal residual is the distance of `F(y)` from the PSD cone (via the
/// most negative eigenvalue) plus the free-segment violation.
pub fn kkt_residuals(p: &SdpProblem, y: &[f64], z: &[DenseSym], zf: &[f64]) -> KktResiduals {
    let (fy, ff) = p.eval_lmi(y);
    let mut neg = 0.0f64;
    for (b, blk) in fy.iter().zip(&p.blocks) {
        let e = match blk {
            Block::Psd(_) => b.min_eigenvalue(),
            Block::Diag(n) => (0..*n).map(|i| b.get(i, i)).fold(f64::INFINITY, f64::min),
        };
        if e < 0.0 {
            neg = neg.max(-e);
        }
    }
    let free_v = norm(&ff);
    let f0n = p.f0.entries.iter().map(|e| e.3 * e.3).sum::<f64>().sqrt();
    let primal = (neg + free_v) / (1.0 + f0n);
    let r: Vec<f64> = p.constraints.iter().zip(&p.objective).map(|(f, bi)| f.dot(z, zf) - bi).collect();
    let dual = norm(&r) / (1.0 + norm(&p.objective));
    let pobj = dot(&p.objective, y);
    let dobj = -p.f0.dot(z, zf);
    let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
    KktResiduals { primal, dual, gap }
}
