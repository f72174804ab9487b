//! The five candidate regressors behind one fit/predict contract.

mod linear;
mod svr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use linear::{fit_elastic_net, fit_lasso, fit_ridge, kkt_residual, CdOptions, LinearModel};
pub use svr::{default_gamma, dual_objective, fit_svr, rbf_kernel, KernelSpec, SvrModel, SvrOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("expected {expected} input columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training data contains non-finite values")]
    NonFinite,
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("solver stopped after {iterations} iterations without converging")]
    NotConverged { iterations: usize, partial: Box<FittedModel> },
    #[error("all training rows are identical")]
    DegenerateKernel,
}

/// Solver diagnostics attached to every fitted model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FitInfo {
    pub iterations: usize,
    pub converged: bool,
    /// Ridge only: the normal equations were singular and a pseudo-inverse was used.
    pub pseudo_inverse: bool,
    /// SVR only: primal minus dual objective at the returned solution.
    pub duality_gap: Option<f64>,
    /// SVR only: dual objective `½βᵀKβ + ε‖β‖₁ − yᵀβ` (minimization form).
    pub dual_objective: Option<f64>,
}

/// One model configuration with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelSpec {
    Lasso { lambda: f64, tol: f64, max_iter: usize },
    ElasticNet { lambda: f64, mix: f64, tol: f64, max_iter: usize },
    Ridge { lambda: f64 },
    SvrLinear { c: f64, epsilon: f64 },
    /// `gamma: None` means `1 / (n_features · Var(X))` on the training inputs.
    SvrRbf { c: f64, epsilon: f64, gamma: Option<f64> },
}

impl ModelSpec {
    pub fn lasso() -> Self {
        ModelSpec::Lasso { lambda: 1.0, tol: 1e-4, max_iter: 1000 }
    }

    pub fn elastic_net() -> Self {
        ModelSpec::ElasticNet { lambda: 1.0, mix: 0.5, tol: 1e-4, max_iter: 1000 }
    }

    pub fn ridge() -> Self {
        ModelSpec::Ridge { lambda: 1.0 }
    }

    pub fn svr_linear() -> Self {
        ModelSpec::SvrLinear { c: 1.0, epsilon: 0.1 }
    }

    pub fn svr_rbf() -> Self {
        ModelSpec::SvrRbf { c: 1.0, epsilon: 0.1, gamma: None }
    }

    /// Default configurations in registry (tie-break) order.
    pub fn registry() -> [ModelSpec; 5] {
        [Self::lasso(), Self::elastic_net(), Self::ridge(), Self::svr_linear(), Self::svr_rbf()]
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Lasso { .. } => "lasso",
            ModelSpec::ElasticNet { .. } => "elastic-net",
            ModelSpec::Ridge { .. } => "ridge",
            ModelSpec::SvrLinear { .. } => "svr-linear",
            ModelSpec::SvrRbf { .. } => "svr-rbf",
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidHyperparameter(msg));
        match *self {
            ModelSpec::Lasso { lambda, tol, .. } | ModelSpec::ElasticNet { lambda, tol, .. } if !(lambda >= 0.0) || !(tol > 0.0) => {
                bad(format!("{}: lambda must be ≥ 0 and tol > 0", self.name()))
            }
            ModelSpec::ElasticNet { mix, .. } if !(0.0..=1.0).contains(&mix) => bad(format!("elastic-net: mix {mix} outside [0, 1]")),
            ModelSpec::Ridge { lambda } if !(lambda >= 0.0) => bad(format!("ridge: lambda {lambda} < 0")),
            ModelSpec::SvrLinear { c, epsilon } | ModelSpec::SvrRbf { c, epsilon, .. } if !(c > 0.0) || !(epsilon >= 0.0) => {
                bad(format!("{}: need C > 0 and epsilon ≥ 0", self.name()))
            }
            ModelSpec::SvrRbf { gamma: Some(g), .. } if !(g > 0.0) => bad(format!("svr-rbf: gamma {g} ≤ 0")),
            _ => Ok(()),
        }
    }
}

/// Z-scoring learned on training rows; zero-variance columns keep scale 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &DMatrix<f64>) -> Self {
        let (mean, scale) = (0..x.ncols())
            .map(|j| {
                let col: Vec<f64> = x.column(j).iter().copied().collect();
                let m = crate::numeric::mean(&col);
                let sd = crate::numeric::population_variance(&col).sqrt();
                (m, if sd > 0.0 { sd } else { 1.0 })
            })
            .unzip();
        Self { mean, scale }
    }

    pub fn transform_row(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.mean).zip(&self.scale).map(|((v, m), s)| (v - m) / s).collect()
    }

    pub fn transform(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(x.nrows(), x.ncols(), |r, c| (x[(r, c)] - self.mean[c]) / self.scale[c])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ModelParams {
    Linear(LinearModel),
    Svr(SvrModel),
}

/// A fitted model with everything needed to re-predict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub spec: ModelSpec,
    pub n_inputs: usize,
    pub standardizer: Option<Standardizer>,
    pub params: ModelParams,
    pub info: FitInfo,
}

/// Anything that maps one input row to a prediction.
pub trait Predictor {
    fn predict_one(&self, x: &[f64]) -> Result<f64, ModelError>;
}

impl<F: Fn(&[f64]) -> f64> Predictor for F {
    fn predict_one(&self, x: &[f64]) -> Result<f64, ModelError> {
        Ok(self(x))
    }
}

impl Predictor for FittedModel {
    fn predict_one(&self, x: &[f64]) -> Result<f64, ModelError> {
        if x.len() != self.n_inputs {
            return Err(ModelError::DimensionMismatch { expected: self.n_inputs, found: x.len() });
        }
        let scaled;
        let x = match &self.standardizer {
            Some(s) => {
                scaled = s.transform_row(x);
                &scaled[..]
            }
            None => x,
        };
        match &self.params {
            ModelParams::Linear(m) => m.predict_one(x),
            ModelParams::Svr(m) => m.predict_one(x),
        }
    }
}

impl FittedModel {
    pub fn predict(&self, x: &DMatrix<f64>) -> Result<Vec<f64>, ModelError> {
        (0..x.nrows())
            .map(|r| {
                let row: Vec<f64> = x.row(r).iter().copied().collect();
                self.predict_one(&row)
            })
            .collect()
    }
}

fn check_training(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<(), ModelError> {
    if x.nrows() == 0 {
        return Err(ModelError::EmptyTrainingSet);
    }
    if x.nrows() != y.len() {
        return Err(ModelError::DimensionMismatch { expected: x.nrows(), found: y.len() });
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(ModelError::NonFinite);
    }
    Ok(())
}

/// Fits `spec`; with `standardize` the inputs are z-scored on these rows first.
pub fn fit(spec: &ModelSpec, x: &DMatrix<f64>, y: &DVector<f64>, standardize: bool) -> Result<FittedModel, ModelError> {
    spec.validate()?;
    check_training(x, y)?;
    let standardizer = standardize.then(|| Standardizer::fit(x));
    let xs = match &standardizer {
        Some(s) => s.transform(x),
        None => x.clone(),
    };
    let wrap = |params: ModelParams, info: FitInfo| FittedModel {
        spec: *spec,
        n_inputs: x.ncols(),
        standardizer: standardizer.clone(),
        params,
        info,
    };
    let linear = |res: Result<(LinearModel, FitInfo), (LinearModel, FitInfo)>| match res {
        Ok((m, info)) => Ok(wrap(ModelParams::Linear(m), info)),
        Err((m, info)) => Err(ModelError::NotConverged {
            iterations: info.iterations,
            partial: Box::new(wrap(ModelParams::Linear(m), info)),
        }),
    };
    match *spec {
        ModelSpec::Ridge { lambda } => {
            let (m, info) = fit_ridge(&xs, y, lambda);
            Ok(wrap(ModelParams::Linear(m), info))
        }
        ModelSpec::Lasso { lambda, tol, max_iter } => linear(fit_lasso(&xs, y, lambda, CdOptions { tol, max_iter })),
        ModelSpec::ElasticNet { lambda, mix, tol, max_iter } => {
            linear(fit_elastic_net(&xs, y, lambda, mix, CdOptions { tol, max_iter }))
        }
        ModelSpec::SvrLinear { c, epsilon } => svr_fit(&xs, y, SvrOptions::new(c, epsilon, KernelSpec::Linear), wrap),
        ModelSpec::SvrRbf { c, epsilon, gamma } => {
            let gamma = gamma.unwrap_or_else(|| default_gamma(&xs));
            svr_fit(&xs, y, SvrOptions::new(c, epsilon, KernelSpec::Rbf { gamma }), wrap)
        }
    }
}

fn svr_fit(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    options: SvrOptions,
    wrap: impl Fn(ModelParams, FitInfo) -> FittedModel,
) -> Result<FittedModel, ModelError> {
    match fit_svr(x, y, &options)? {
        (m, info) if info.converged => Ok(wrap(ModelParams::Svr(m), info)),
        (m, info) => Err(ModelError::NotConverged {
            iterations: info.iterations,
            partial: Box::new(wrap(ModelParams::Svr(m), info)),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_order_and_defaults() {
        let names: Vec<_> = ModelSpec::registry().iter().map(|s| s.name()).collect();
        assert_eq!(names, ["lasso", "elastic-net", "ridge", "svr-linear", "svr-rbf"]);
        assert_eq!(ModelSpec::ridge(), ModelSpec::Ridge { lambda: 1.0 });
        assert_eq!(ModelSpec::svr_linear(), ModelSpec::SvrLinear { c: 1.0, epsilon: 0.1 });
    }

    #[test]
    fn invalid_hyperparameters() {
        assert!(ModelSpec::Ridge { lambda: -1.0 }.validate().is_err());
        assert!(ModelSpec::ElasticNet { lambda: 1.0, mix: 1.5, tol: 1e-4, max_iter: 10 }.validate().is_err());
        assert!(ModelSpec::SvrLinear { c: 0.0, epsilon: 0.1 }.validate().is_err());
        assert!(ModelSpec::SvrRbf { c: 1.0, epsilon: 0.1, gamma: Some(0.0) }.validate().is_err());
        assert!(ModelSpec::Lasso { lambda: f64::NAN, tol: 1e-4, max_iter: 10 }.validate().is_err());
    }

    #[test]
    fn json_round_trip_predicts_identically() {
        let x = DMatrix::from_row_slice(4, 2, &[0.0, 1.0, 1.0, 0.5, 2.0, 2.0, 3.0, -1.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 2.5, 4.5]);
        for spec in ModelSpec::registry() {
            let m = fit(&spec, &x, &y, true).unwrap();
            let back: FittedModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
            assert_eq!(back.predict(&x).unwrap(), m.predict(&x).unwrap(), "{}", spec.name());
        }
    }

    #[test]
    fn dimension_mismatch() {
        let x = DMatrix::from_row_slice(3, 1, &[0.0, 1.0, 2.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let m = fit(&ModelSpec::ridge(), &x, &y, false).unwrap();
        assert_eq!(m.predict_one(&[1.0, 2.0]), Err(ModelError::DimensionMismatch { expected: 1, found: 2 }));
    }

    #[test]
    fn fitting_is_deterministic() {
        let x = DMatrix::from_fn(12, 6, |r, c| ((r * 7 + c * 3) % 11) as f64 - 5.0 + 0.1 * r as f64);
        let y = DVector::from_fn(12, |r, _| 50.0 + (r as f64 * 0.7).sin());
        for spec in ModelSpec::registry() {
            let a = fit(&spec, &x, &y, false);
            let b = fit(&spec, &x, &y, false);
            assert_eq!(a, b);
        }
    }
}
