use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{FitInfo, ModelError};

/// `ŷ = x·w + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn predict_one(&self, x: &[f64]) -> Result<f64, ModelError> {
        if x.len() != self.weights.len() {
            return Err(ModelError::DimensionMismatch { expected: self.weights.len(), found: x.len() });
        }
        Ok(x.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>() + self.intercept)
    }
}

struct Centered {
    x: DMatrix<f64>,
    y: DVector<f64>,
    x_mean: Vec<f64>,
    y_mean: f64,
}

fn center(x: &DMatrix<f64>, y: &DVector<f64>) -> Centered {
    let n = x.nrows() as f64;
    let x_mean: Vec<f64> = x.column_iter().map(|c| c.sum() / n).collect();
    let y_mean = y.sum() / n;
    Centered {
        x: DMatrix::from_fn(x.nrows(), x.ncols(), |r, c| x[(r, c)] - x_mean[c]),
        y: y.map(|v| v - y_mean),
        x_mean,
        y_mean,
    }
}

fn with_intercept(c: &Centered, w: &DVector<f64>) -> LinearModel {
    let intercept = c.y_mean - c.x_mean.iter().zip(w.iter()).map(|(m, w)| m * w).sum::<f64>();
    LinearModel { weights: w.iter().copied().collect(), intercept }
}

/// Closed-form ridge: minimizes `‖y − Xw − b‖² + λ‖w‖²`, intercept unpenalized.
///
/// A singular system falls back to the minimum-norm pseudo-inverse solution
/// and sets `FitInfo::pseudo_inverse`.
pub fn fit_ridge(x: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> (LinearModel, FitInfo) {
    let c = center(x, y);
    let p = x.ncols();
    let gram = c.x.transpose() * &c.x + DMatrix::identity(p, p) * lambda;
    let rhs = c.x.transpose() * &c.y;
    let mut info = FitInfo { converged: true, ..Default::default() };
    let w = match gram.clone().cholesky() {
        Some(chol) if lambda > 0.0 || is_well_conditioned(&gram) => chol.solve(&rhs),
        _ => {
            info.pseudo_inverse = true;
            let svd = gram.svd(true, true);
            let tol = svd.singular_values.max() * p as f64 * f64::EPSILON;
            svd.solve(&rhs, tol).unwrap_or_else(|_| DVector::zeros(p))
        }
    };
    (with_intercept(&c, &w), info)
}

fn is_well_conditioned(gram: &DMatrix<f64>) -> bool {
    let s = gram.singular_values();
    let max = s.max();
    max > 0.0 && s.min() > max * gram.nrows() as f64 * f64::EPSILON
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CdOptions {
    fn default() -> Self {
        Self { tol: 1e-4, max_iter: 1000 }
    }
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Per-coordinate subgradient optimality violation of the elastic-net objective
/// `(1/2n)‖y − Xw − b‖² + λ·mix·‖w‖₁ + (λ(1−mix)/2)‖w‖²` at `model`.
pub fn kkt_residual(x: &DMatrix<f64>, y: &DVector<f64>, model: &LinearModel, lambda: f64, mix: f64) -> Vec<f64> {
    let n = x.nrows() as f64;
    let c = center(x, y);
    let w = DVector::from_column_slice(&model.weights);
    let r = &c.y - &c.x * &w;
    let l1 = lambda * mix;
    let l2 = lambda * (1.0 - mix);
    (0..x.ncols())
        .map(|j| {
            let g = -c.x.column(j).dot(&r) / n + l2 * w[j];
            if w[j] > 0.0 {
                (g + l1).abs()
            } else if w[j] < 0.0 {
                (g - l1).abs()
            } else {
                (g.abs() - l1).max(0.0)
            }
        })
        .collect()
}

/// Cyclic coordinate descent for the elastic-net objective.
///
/// Converged once a full sweep moves no coefficient by `tol` or more and
/// every coordinate's subgradient violation is below `tol`. Columns with zero
/// variance keep weight 0. `Err` carries the last iterate.
pub fn fit_elastic_net(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    mix: f64,
    options: CdOptions,
) -> Result<(LinearModel, FitInfo), (LinearModel, FitInfo)> {
    let n = x.nrows() as f64;
    let p = x.ncols();
    let c = center(x, y);
    let l1 = lambda * mix;
    let l2 = lambda * (1.0 - mix);
    let norms: Vec<f64> = (0..p).map(|j| c.x.column(j).norm_squared() / n).collect();
    let mut w: DVector<f64> = DVector::zeros(p);
    let mut r = c.y.clone();
    let mut info = FitInfo::default();

    for sweep in 1..=options.max_iter {
        info.iterations = sweep;
        let mut max_delta: f64 = 0.0;
        for j in 0..p {
            if norms[j] == 0.0 {
                continue;
            }
            let col = c.x.column(j);
            let rho = col.dot(&r) / n + norms[j] * w[j];
            let new: f64 = soft_threshold(rho, l1) / (norms[j] + l2);
            let delta = new - w[j];
            if delta != 0.0 {
                r.axpy(-delta, &col, 1.0);
                w[j] = new;
                max_delta = max_delta.max(delta.abs());
            }
        }
        if max_delta < options.tol {
            r = &c.y - &c.x * &w;
            let model = with_intercept(&c, &w);
            let kkt = kkt_residual(x, y, &model, lambda, mix);
            if kkt.iter().all(|&v| v < options.tol) {
                info.converged = true;
                return Ok((model, info));
            }
        }
    }
    Err((with_intercept(&c, &w), info))
}

/// Lasso: elastic net with `mix = 1`.
pub fn fit_lasso(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    options: CdOptions,
) -> Result<(LinearModel, FitInfo), (LinearModel, FitInfo)> {
    fit_elastic_net(x, y, lambda, 1.0, options)
}
