use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{FitInfo, ModelError};
use crate::numeric::exact_dot;

const TAU: f64 = 1e-12;
const STALL_WINDOW: usize = 1000;
const ROUND_ITERS: usize = 20_000;
const IPM_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    Linear,
    Rbf { gamma: f64 },
}

impl KernelSpec {
    pub fn eval(&self, u: &[f64], v: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => u.iter().zip(v).map(|(a, b)| a * b).sum(),
            KernelSpec::Rbf { gamma } => {
                let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

/// `exp(−γ‖u − v‖²)`.
pub fn rbf_kernel(u: &[f64], v: &[f64], gamma: f64) -> Result<f64, ModelError> {
    if u.len() != v.len() {
        return Err(ModelError::DimensionMismatch { expected: u.len(), found: v.len() });
    }
    if !(gamma > 0.0) {
        return Err(ModelError::InvalidHyperparameter(format!("gamma {gamma} ≤ 0")));
    }
    Ok(KernelSpec::Rbf { gamma }.eval(u, v))
}

/// `1 / (n_features · Var(X))` over all entries; 1 when the variance is zero.
pub fn default_gamma(x: &DMatrix<f64>) -> f64 {
    let entries: Vec<f64> = x.iter().copied().collect();
    let var = crate::numeric::population_variance(&entries);
    if var > 0.0 {
        1.0 / (x.ncols() as f64 * var)
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvrOptions {
    pub c: f64,
    pub epsilon: f64,
    pub kernel: KernelSpec,
    /// Convergence certificate: `gap ≤ gap_tol · max(1, |primal|)`.
    pub gap_tol: f64,
    pub max_iter: usize,
}

impl SvrOptions {
    pub fn new(c: f64, epsilon: f64, kernel: KernelSpec) -> Self {
        Self { c, epsilon, kernel, gap_tol: 1e-6, max_iter: 20_000 }
    }
}

/// `f(x) = Σᵢ βᵢ K(xᵢ, x) + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    /// `αᵢ − αᵢ*` for every training row.
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub kernel: KernelSpec,
    pub support_rows: Vec<Vec<f64>>,
}

impl SvrModel {
    pub fn predict_one(&self, x: &[f64]) -> Result<f64, ModelError> {
        let dim = self.support_rows.first().map_or(x.len(), Vec::len);
        if x.len() != dim {
            return Err(ModelError::DimensionMismatch { expected: dim, found: x.len() });
        }
        if let Some(w) = self.linear_weights() {
            return Ok(exact_dot(&w, x) + self.bias);
        }
        let terms: Vec<f64> = self
            .dual_coef
            .iter()
            .zip(&self.support_rows)
            .filter(|(b, _)| **b != 0.0)
            .map(|(b, row)| b * self.kernel.eval(row, x))
            .collect();
        Ok(crate::numeric::exact_sum(terms) + self.bias)
    }

    /// Primal weights of a linear-kernel model, `w = Σ βᵢ xᵢ`.
    pub fn linear_weights(&self) -> Option<Vec<f64>> {
        if self.kernel != KernelSpec::Linear {
            return None;
        }
        let dim = self.support_rows.first().map_or(0, Vec::len);
        Some(
            (0..dim)
                .map(|j| {
                    let col: Vec<f64> = self.support_rows.iter().map(|r| r[j]).collect();
                    exact_dot(&col, &self.dual_coef)
                })
                .collect(),
        )
    }
}

/// Kernel access for the solvers. The linear kernel keeps the rows and
/// evaluates `Kβ = X(Xᵀβ)`, so a small-scale column still counts next to
/// columns many orders of magnitude larger; the dense matrix alone would round
/// it away.
enum Gram<'a> {
    Dense(DMatrix<f64>),
    Linear { x: &'a DMatrix<f64>, k: DMatrix<f64> },
}

impl<'a> Gram<'a> {
    fn new(x: &'a DMatrix<f64>, kernel: KernelSpec) -> (Self, Vec<Vec<f64>>) {
        let rows: Vec<Vec<f64>> = (0..x.nrows()).map(|r| x.row(r).iter().copied().collect()).collect();
        let n = rows.len();
        let gram = match kernel {
            KernelSpec::Linear => Gram::Linear { x, k: DMatrix::from_fn(n, n, |i, j| exact_dot(&rows[i], &rows[j])) },
            KernelSpec::Rbf { .. } => Gram::Dense(DMatrix::from_fn(n, n, |i, j| kernel.eval(&rows[i], &rows[j]))),
        };
        (gram, rows)
    }

    fn dense(&self) -> &DMatrix<f64> {
        match self {
            Gram::Dense(k) | Gram::Linear { k, .. } => k,
        }
    }

    /// Rows of `X` whose Gram matrix this is, when the kernel is linear.
    fn features(&self) -> Option<&DMatrix<f64>> {
        match self {
            Gram::Dense(_) => None,
            Gram::Linear { x, .. } => Some(x),
        }
    }

    /// `Xᵀβ` for the linear kernel.
    fn weights(x: &DMatrix<f64>, beta: &[f64]) -> Vec<f64> {
        (0..x.ncols())
            .map(|j| {
                let col: Vec<f64> = x.column(j).iter().copied().collect();
                exact_dot(&col, beta)
            })
            .collect()
    }

    fn product(&self, beta: &[f64]) -> DVector<f64> {
        match self {
            Gram::Dense(k) => gram_product(k, beta),
            Gram::Linear { x, .. } => {
                let w = Self::weights(x, beta);
                DVector::from_fn(x.nrows(), |i, _| {
                    let row: Vec<f64> = x.row(i).iter().copied().collect();
                    exact_dot(&row, &w)
                })
            }
        }
    }

    /// `βᵀKβ`.
    fn quad(&self, beta: &[f64]) -> f64 {
        match self {
            Gram::Dense(k) => exact_dot(beta, gram_product(k, beta).as_slice()),
            Gram::Linear { x, .. } => {
                let w = Self::weights(x, beta);
                exact_dot(&w, &w)
            }
        }
    }
}

/// Dual objective in minimization form: `½βᵀKβ + ε‖β‖₁ − yᵀβ`.
pub fn dual_objective(k: &DMatrix<f64>, y: &[f64], epsilon: f64, beta: &[f64]) -> f64 {
    let l1: f64 = beta.iter().map(|v| v.abs()).sum();
    0.5 * exact_dot(beta, gram_product(k, beta).as_slice()) + epsilon * l1 - exact_dot(y, beta)
}

/// `Kβ` with exact dot products.
fn gram_product(k: &DMatrix<f64>, beta: &[f64]) -> DVector<f64> {
    let n = beta.len();
    DVector::from_fn(n, |i, _| {
        let row: Vec<f64> = (0..n).map(|j| k[(i, j)]).collect();
        exact_dot(&row, beta)
    })
}

/// Bias minimizing the ε-insensitive loss for fixed `Kβ`; candidates are the loss breakpoints.
fn best_bias(kb: &DVector<f64>, y: &[f64], c: f64, epsilon: f64, start: f64) -> f64 {
    let loss = |b: f64| -> f64 {
        y.iter().zip(kb.iter()).map(|(yi, f)| ((yi - f - b).abs() - epsilon).max(0.0)).sum::<f64>() * c
    };
    let mut best = (loss(start), start);
    for (yi, f) in y.iter().zip(kb.iter()) {
        for cand in [yi - f - epsilon, yi - f + epsilon] {
            let l = loss(cand);
            if l < best.0 {
                best = (l, cand);
            }
        }
    }
    best.1
}

/// A dual point with its best bias and both objective values.
#[derive(Debug, Clone)]
struct Certificate {
    beta: Vec<f64>,
    bias: f64,
    primal: f64,
    dual: f64,
}

impl Certificate {
    /// Primal `½βᵀKβ + C Σ max(0, |yᵢ − fᵢ| − ε)` against the dual at `beta`.
    fn new(gram: &Gram, y: &[f64], c: f64, epsilon: f64, beta: Vec<f64>, bias_start: f64) -> Self {
        let kb = gram.product(&beta);
        let quad = gram.quad(&beta);
        let bias = best_bias(&kb, y, c, epsilon, bias_start);
        let loss: f64 = y.iter().zip(kb.iter()).map(|(yi, f)| ((yi - f - bias).abs() - epsilon).max(0.0)).sum();
        let l1: f64 = beta.iter().map(|v| v.abs()).sum();
        let primal = 0.5 * quad + c * loss;
        let dual = 0.5 * quad + epsilon * l1 - exact_dot(y, &beta);
        Self { beta, bias, primal, dual }
    }

    fn gap(&self) -> f64 {
        self.primal + self.dual
    }

    fn converged(&self, tol: f64) -> bool {
        self.gap() <= tol * self.primal.abs().max(1.0)
    }

    fn better_than(&self, other: &Option<Certificate>) -> bool {
        self.gap().is_finite() && other.as_ref().is_none_or(|o| self.gap() < o.gap())
    }
}

/// Solves `a·x = b` by LU, then refines against exactly computed residuals.
fn solve_refined(a: &DMatrix<f64>, b: &DVector<f64>, rounds: usize) -> Option<DVector<f64>> {
    let lu = a.clone().lu();
    let mut x = lu.solve(b)?;
    for _ in 0..rounds {
        let resid = DVector::from_fn(b.len(), |r, _| {
            let row: Vec<f64> = a.row(r).iter().copied().collect();
            b[r] - exact_dot(&row, x.as_slice())
        });
        x += lu.solve(&resid)?;
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// SMO state over the 2n-variable libsvm formulation of ε-SVR.
struct Smo<'a> {
    k: &'a DMatrix<f64>,
    n: usize,
    c: f64,
    alpha: Vec<f64>,
    grad: Vec<f64>,
    sign: Vec<f64>,
}

impl Smo<'_> {
    /// `Q_ij = s_i s_j K(i mod n, j mod n)`.
    fn q(&self, i: usize, j: usize) -> f64 {
        self.sign[i] * self.sign[j] * self.k[(i % self.n, j % self.n)]
    }

    fn qd(&self, i: usize) -> f64 {
        self.k[(i % self.n, i % self.n)]
    }

    fn select(&self, eps: f64) -> Option<(usize, usize)> {
        let m = 2 * self.n;
        let mut gmax = f64::NEG_INFINITY;
        let mut i = None;
        for t in 0..m {
            if self.sign[t] > 0.0 {
                if self.alpha[t] < self.c && -self.grad[t] >= gmax {
                    gmax = -self.grad[t];
                    i = Some(t);
                }
            } else if self.alpha[t] > 0.0 && self.grad[t] >= gmax {
                gmax = self.grad[t];
                i = Some(t);
            }
        }
        let i = i?;
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j = None;
        let mut best = f64::INFINITY;
        for t in 0..m {
            let (grad_diff, quad) = if self.sign[t] > 0.0 {
                if self.alpha[t] <= 0.0 {
                    continue;
                }
                gmax2 = gmax2.max(self.grad[t]);
                (gmax + self.grad[t], self.qd(i) + self.qd(t) - 2.0 * self.sign[i] * self.q(i, t))
            } else {
                if self.alpha[t] >= self.c {
                    continue;
                }
                gmax2 = gmax2.max(-self.grad[t]);
                (gmax - self.grad[t], self.qd(i) + self.qd(t) + 2.0 * self.sign[i] * self.q(i, t))
            };
            if grad_diff > 0.0 {
                let obj = -(grad_diff * grad_diff) / quad.max(TAU);
                if obj <= best {
                    best = obj;
                    j = Some(t);
                }
            }
        }
        if gmax + gmax2 < eps {
            return None;
        }
        j.map(|j| (i, j))
    }

    fn update(&mut self, i: usize, j: usize) {
        let c = self.c;
        let (old_i, old_j) = (self.alpha[i], self.alpha[j]);
        let qij = self.q(i, j);
        let (mut ai, mut aj) = (old_i, old_j);
        if self.sign[i] != self.sign[j] {
            let quad = (self.qd(i) + self.qd(j) + 2.0 * qij).max(TAU);
            let delta = (-self.grad[i] - self.grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let quad = (self.qd(i) + self.qd(j) - 2.0 * qij).max(TAU);
            let delta = (self.grad[i] - self.grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        self.alpha[i] = ai;
        self.alpha[j] = aj;
        let (di, dj) = (ai - old_i, aj - old_j);
        for t in 0..2 * self.n {
            self.grad[t] += self.q(i, t) * di + self.q(j, t) * dj;
        }
    }

    fn rho(&self) -> f64 {
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut n_free, mut sum_free) = (0usize, 0.0);
        for t in 0..2 * self.n {
            let yg = self.sign[t] * self.grad[t];
            let at_upper = self.alpha[t] >= self.c;
            let at_lower = self.alpha[t] <= 0.0;
            if at_upper {
                if self.sign[t] < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if at_lower {
                if self.sign[t] > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                n_free += 1;
                sum_free += yg;
            }
        }
        if n_free > 0 {
            sum_free / n_free as f64
        } else {
            (ub + lb) / 2.0
        }
    }

    /// Dual objective from the maintained gradient, `½ Σ αₜ (Gₜ + pₜ)`.
    fn objective(&self, p: &[f64]) -> f64 {
        0.5 * (0..2 * self.n).map(|t| self.alpha[t] * (self.grad[t] + p[t])).sum::<f64>()
    }

    fn beta(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.alpha[i] - self.alpha[i + self.n]).collect()
    }

    fn set_beta(&mut self, beta: &[f64], p: &[f64]) {
        let n = self.n;
        for i in 0..n {
            self.alpha[i] = beta[i].max(0.0);
            self.alpha[i + n] = (-beta[i]).max(0.0);
        }
        for t in 0..2 * n {
            self.grad[t] = p[t] + (0..2 * n).map(|u| self.q(t, u) * self.alpha[u]).sum::<f64>();
        }
    }
}

/// Solves the KKT system on one face of the box: entries in `free` keep the
/// sign of `beta`, the rest snap to 0 or ±C. Returns `None` when the solution
/// leaves the face.
fn polish(gram: &Gram, y: &[f64], c: f64, epsilon: f64, beta: &[f64], free: &[usize]) -> Option<Vec<f64>> {
    let n = beta.len();
    if free.is_empty() {
        return None;
    }
    let is_free = |i: usize| free.contains(&i);
    let mut out: Vec<f64> = (0..n)
        .map(|i| match i {
            i if is_free(i) => beta[i],
            i if beta[i].abs() < c / 2.0 => 0.0,
            i => c.copysign(beta[i]),
        })
        .collect();
    let fixed: Vec<f64> = (0..n).map(|i| if is_free(i) { 0.0 } else { out[i] }).collect();
    let fixed_k = gram.product(&fixed);
    let m = free.len();
    // Unknowns: β_F, then (linear kernel only) v = X_Fᵀβ_F, then the bias.
    let (a, rhs) = match gram.features() {
        None => {
            let k = gram.dense();
            let mut a = DMatrix::zeros(m + 1, m + 1);
            let mut rhs = DVector::zeros(m + 1);
            for (r, &i) in free.iter().enumerate() {
                for (col, &j) in free.iter().enumerate() {
                    a[(r, col)] = k[(i, j)];
                }
                a[(r, m)] = 1.0;
                a[(m, r)] = 1.0;
                rhs[r] = y[i] - epsilon * beta[i].signum() - fixed_k[i];
            }
            rhs[m] = -crate::numeric::exact_sum(fixed.iter().copied());
            (a, rhs)
        }
        Some(x) => {
            let p = x.ncols();
            let size = m + p + 1;
            let mut a = DMatrix::zeros(size, size);
            let mut rhs = DVector::zeros(size);
            let fixed_w = Gram::weights(x, &fixed);
            for (r, &i) in free.iter().enumerate() {
                for k in 0..p {
                    a[(r, m + k)] = x[(i, k)];
                    a[(m + k, r)] = x[(i, k)];
                }
                a[(r, m + p)] = 1.0;
                a[(m + p, r)] = 1.0;
                rhs[r] = y[i] - epsilon * beta[i].signum();
            }
            for k in 0..p {
                a[(m + k, m + k)] = -1.0;
                rhs[m + k] = -fixed_w[k];
            }
            rhs[m + p] = -crate::numeric::exact_sum(fixed.iter().copied());
            (a, rhs)
        }
    };
    let sol = solve_refined(&a, &rhs, 3)?;
    for (r, &i) in free.iter().enumerate() {
        let v = sol[r];
        if v.signum() != beta[i].signum() || v.abs() > c {
            return None;
        }
        out[i] = v;
    }
    Some(out)
}

/// Mehrotra predictor-corrector interior point on the 2n-variable dual,
/// with a face polish after every step. Returns the best certificate seen and
/// the iteration count.
fn interior_point(gram: &Gram, y: &[f64], c: f64, epsilon: f64, gap_tol: f64) -> (Option<Certificate>, usize) {
    let n = y.len();
    let m = 2 * n;
    let sign: Vec<f64> = (0..m).map(|t| if t < n { 1.0 } else { -1.0 }).collect();
    let p: Vec<f64> = (0..m).map(|t| if t < n { epsilon - y[t] } else { epsilon + y[t - n] }).collect();
    let extra = gram.features().map_or(0, |x| x.ncols());
    let size = m + extra + 1;
    let mut a = vec![c / 2.0; m];
    let mut z = vec![1.0; m];
    let mut w = vec![1.0; m];
    let mut nu = 0.0;
    let mut best: Option<Certificate> = None;
    let mut iterations = 0;
    let beta_of = |a: &[f64]| -> Vec<f64> { (0..n).map(|i| a[i] - a[i + n]).collect() };

    // Static part of the Newton matrix; the diagonal of the first block varies.
    let mut base = DMatrix::zeros(size, size);
    match gram.features() {
        None => {
            let k = gram.dense();
            for i in 0..m {
                for j in 0..m {
                    base[(i, j)] = sign[i] * sign[j] * k[(i % n, j % n)];
                }
            }
        }
        Some(x) => {
            for t in 0..m {
                for k in 0..extra {
                    base[(t, m + k)] = sign[t] * x[(t % n, k)];
                    base[(m + k, t)] = sign[t] * x[(t % n, k)];
                }
            }
            for k in 0..extra {
                base[(m + k, m + k)] = -1.0;
            }
        }
    }
    for t in 0..m {
        base[(t, size - 1)] = sign[t];
        base[(size - 1, t)] = sign[t];
    }

    for iter in 1..=IPM_MAX_ITER {
        iterations = iter;
        let kb = gram.product(&beta_of(&a));
        let t: Vec<f64> = a.iter().map(|ai| c - ai).collect();
        let rd: Vec<f64> = (0..m).map(|i| sign[i] * kb[i % n] + p[i] + sign[i] * nu - z[i] + w[i]).collect();
        let rp = crate::numeric::exact_sum((0..m).map(|i| sign[i] * a[i]));
        let mu = (0..m).map(|i| a[i] * z[i] + t[i] * w[i]).sum::<f64>() / (2 * m) as f64;

        let mut h = base.clone();
        for i in 0..m {
            h[(i, i)] += z[i] / a[i] + w[i] / t[i];
        }
        let Some(lu) = Some(h.lu()) else { break };
        let solve = |lower: &[f64], upper: &[f64]| -> Option<(Vec<f64>, f64, Vec<f64>, Vec<f64>)> {
            let mut rhs = DVector::zeros(size);
            for i in 0..m {
                rhs[i] = -rd[i] + lower[i] / a[i] - upper[i] / t[i];
            }
            rhs[size - 1] = -rp;
            let d = lu.solve(&rhs)?;
            let da: Vec<f64> = (0..m).map(|i| d[i]).collect();
            let dz = (0..m).map(|i| (lower[i] - z[i] * da[i]) / a[i]).collect();
            let dw = (0..m).map(|i| (upper[i] + w[i] * da[i]) / t[i]).collect();
            Some((da, d[size - 1], dz, dw))
        };
        let step = |da: &[f64], dz: &[f64], dw: &[f64]| -> f64 {
            let mut alpha: f64 = 1.0;
            for i in 0..m {
                for (v, dv) in [(a[i], da[i]), (t[i], -da[i]), (z[i], dz[i]), (w[i], dw[i])] {
                    if dv < 0.0 {
                        alpha = alpha.min(-v / dv);
                    }
                }
            }
            alpha
        };

        let lower0: Vec<f64> = (0..m).map(|i| -a[i] * z[i]).collect();
        let upper0: Vec<f64> = (0..m).map(|i| -t[i] * w[i]).collect();
        let Some((da, _, dz, dw)) = solve(&lower0, &upper0) else { break };
        let alpha = step(&da, &dz, &dw);
        let mu_aff = (0..m)
            .map(|i| (a[i] + alpha * da[i]) * (z[i] + alpha * dz[i]) + (t[i] - alpha * da[i]) * (w[i] + alpha * dw[i]))
            .sum::<f64>()
            / (2 * m) as f64;
        let sigma = (mu_aff / mu).powi(3).min(1.0);
        let lower: Vec<f64> = (0..m).map(|i| sigma * mu - a[i] * z[i] - da[i] * dz[i]).collect();
        let upper: Vec<f64> = (0..m).map(|i| sigma * mu - t[i] * w[i] + da[i] * dw[i]).collect();
        let Some((da, dnu, dz, dw)) = solve(&lower, &upper) else { break };
        let alpha = (0.995 * step(&da, &dz, &dw)).min(1.0);
        for i in 0..m {
            a[i] = (a[i] + alpha * da[i]).clamp(f64::MIN_POSITIVE, c);
            z[i] += alpha * dz[i];
            w[i] += alpha * dw[i];
        }
        nu += alpha * dnu;
        if a.iter().chain(&z).chain(&w).any(|v| !v.is_finite()) || !nu.is_finite() {
            break;
        }

        let beta = beta_of(&a);
        let t: Vec<f64> = a.iter().map(|ai| c - ai).collect();
        let inside = |i: usize| a[i] > z[i] && t[i] > w[i];
        let free: Vec<usize> = (0..n).filter(|&i| inside(i) || inside(i + n)).collect();
        let polished = polish(gram, y, c, epsilon, &beta, &free);
        let plain = Certificate::new(gram, y, c, epsilon, beta, nu);
        let polished = polished.map(|b| Certificate::new(gram, y, c, epsilon, b, plain.bias));
        for cand in [Some(plain), polished].into_iter().flatten() {
            if cand.better_than(&best) {
                best = Some(cand);
            }
        }
        if best.as_ref().is_some_and(|b| b.gap() <= 0.01 * gap_tol * b.primal.abs().max(1.0)) || mu < 1e-300 {
            break;
        }
    }
    (best, iterations)
}

/// ε-insensitive support vector regression by SMO with second-order working-set
/// selection. The inner tolerance tightens until the duality gap meets
/// `options.gap_tol`; `FitInfo::converged` is false when it never does.
pub fn fit_svr(x: &DMatrix<f64>, y: &DVector<f64>, options: &SvrOptions) -> Result<(SvrModel, FitInfo), ModelError> {
    let n = x.nrows();
    if n < 2 {
        return Err(ModelError::EmptyTrainingSet);
    }
    if (1..n).all(|r| x.row(r) == x.row(0)) {
        return Err(ModelError::DegenerateKernel);
    }
    let (gram, rows) = Gram::new(x, options.kernel);
    let yv: Vec<f64> = y.iter().copied().collect();
    let (c, epsilon) = (options.c, options.epsilon);
    let linear_term: Vec<f64> = (0..2 * n)
        .map(|t| if t < n { epsilon - yv[t] } else { epsilon + yv[t - n] })
        .collect();
    let mut smo = Smo {
        k: gram.dense(),
        n,
        c,
        alpha: vec![0.0; 2 * n],
        grad: linear_term.clone(),
        sign: (0..2 * n).map(|t| if t < n { 1.0 } else { -1.0 }).collect(),
    };

    let mut iterations = 0;
    let mut eps = 1e-3;
    let finish = |cert: Certificate, iterations: usize| {
        let info = FitInfo {
            iterations,
            converged: cert.converged(options.gap_tol),
            duality_gap: Some(cert.gap()),
            dual_objective: Some(cert.dual),
            ..Default::default()
        };
        let model = SvrModel { dual_coef: cert.beta, bias: cert.bias, kernel: options.kernel, support_rows: rows.clone() };
        Ok((model, info))
    };
    loop {
        // A round ends at `eps`-optimality, after ROUND_ITERS updates, or when
        // the objective stops falling.
        let round_end = (iterations + ROUND_ITERS).min(options.max_iter);
        let mut reached_eps = false;
        let mut checkpoint = smo.objective(&linear_term);
        while iterations < round_end {
            let Some((i, j)) = smo.select(eps) else {
                reached_eps = true;
                break;
            };
            smo.update(i, j);
            iterations += 1;
            if iterations % STALL_WINDOW == 0 {
                let obj = smo.objective(&linear_term);
                if !(obj < checkpoint - 1e-15 * checkpoint.abs()) {
                    reached_eps = true;
                    break;
                }
                checkpoint = obj;
            }
        }
        let beta = smo.beta();
        let mut cert = Certificate::new(&gram, &yv, c, epsilon, beta.clone(), -smo.rho());
        let free: Vec<usize> = (0..n).filter(|&i| beta[i] != 0.0 && beta[i].abs() < c).collect();
        if let Some(polished) = polish(&gram, &yv, c, epsilon, &beta, &free) {
            let candidate = Certificate::new(&gram, &yv, c, epsilon, polished, cert.bias);
            if candidate.gap() < cert.gap() {
                smo.set_beta(&candidate.beta, &linear_term);
                cert = candidate;
            }
        }
        if cert.converged(options.gap_tol) {
            return finish(cert, iterations);
        }
        if (reached_eps && eps < 1e-14) || iterations >= options.max_iter {
            // SMO stalls on ill-conditioned kernels; the interior point does not.
            let (ipm, its) = interior_point(&gram, &yv, c, epsilon, options.gap_tol);
            let best = match ipm {
                Some(ipm) if ipm.gap() < cert.gap() => ipm,
                _ => cert,
            };
            return finish(best, iterations + its);
        }
        if reached_eps {
            eps /= 10.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rbf_examples() {
        assert_eq!(rbf_kernel(&[0.3, -1.0], &[0.3, -1.0], 2.0).unwrap(), 1.0);
        assert!((rbf_kernel(&[0.0], &[1.0], 1.0).unwrap() - 0.367879).abs() < 1e-6);
        assert!(rbf_kernel(&[0.0], &[1.0], 1e6).unwrap() < 1e-300);
        assert!(matches!(rbf_kernel(&[0.0], &[1.0, 2.0], 1.0), Err(ModelError::DimensionMismatch { .. })));
    }

    #[test]
    fn constant_target_gives_constant_predictions() {
        let x = DMatrix::from_row_slice(4, 2, &[0.0, 1.0, 1.0, 0.0, 2.0, 3.0, -1.0, 1.0]);
        let y = DVector::from_element(4, 5.0);
        for kernel in [KernelSpec::Linear, KernelSpec::Rbf { gamma: 0.5 }] {
            let (m, info) = fit_svr(&x, &y, &SvrOptions::new(1.0, 0.1, kernel)).unwrap();
            assert!(info.converged);
            assert!(m.dual_coef.iter().all(|&b| b == 0.0));
            for r in 0..4 {
                let row: Vec<f64> = x.row(r).iter().copied().collect();
                assert!((m.predict_one(&row).unwrap() - 5.0).abs() <= 0.1);
            }
        }
    }

    #[test]
    fn identical_rows_are_degenerate() {
        let x = DMatrix::from_row_slice(3, 1, &[1.0, 1.0, 1.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert_eq!(
            fit_svr(&x, &y, &SvrOptions::new(1.0, 0.1, KernelSpec::Linear)).unwrap_err(),
            ModelError::DegenerateKernel
        );
    }

    #[test]
    fn noise_free_line_is_interpolated() {
        let xs = [-2.0, -1.0, 0.0, 0.5, 1.0, 3.0];
        let x = DMatrix::from_row_slice(6, 1, &xs);
        let y = DVector::from_iterator(6, xs.iter().map(|v| 2.0 * v));
        let (m, info) = fit_svr(&x, &y, &SvrOptions::new(1e6, 1e-6, KernelSpec::Linear)).unwrap();
        assert!(info.converged, "{info:?}");
        for v in xs {
            assert!((m.predict_one(&[v]).unwrap() - 2.0 * v).abs() < 1e-3);
        }
    }

    #[test]
    fn dual_constraints_hold() {
        let x = DMatrix::from_row_slice(5, 2, &[0.1, 1.0, 0.7, -0.3, 1.5, 0.2, -0.4, 0.9, 1.1, 1.1]);
        let y = DVector::from_vec(vec![1.0, 0.2, -0.5, 1.4, 0.3]);
        let (m, info) = fit_svr(&x, &y, &SvrOptions::new(1.0, 0.1, KernelSpec::Rbf { gamma: 0.7 })).unwrap();
        assert!(info.converged);
        assert!(m.dual_coef.iter().all(|b| b.abs() <= 1.0 + 1e-12));
        assert!(m.dual_coef.iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn linear_kernel_representer_identity() {
        let x = DMatrix::from_row_slice(5, 2, &[0.1, 1.0, 0.7, -0.3, 1.5, 0.2, -0.4, 0.9, 1.1, 1.1]);
        let y = DVector::from_vec(vec![1.0, 0.2, -0.5, 1.4, 0.3]);
        let (m, _) = fit_svr(&x, &y, &SvrOptions::new(1.0, 0.1, KernelSpec::Linear)).unwrap();
        let w = m.linear_weights().unwrap();
        for probe in [[0.3, -2.0], [10.0, 4.0]] {
            let explicit = w[0] * probe[0] + w[1] * probe[1] + m.bias;
            assert!((m.predict_one(&probe).unwrap() - explicit).abs() < 1e-10);
        }
    }
}
