//! Small numeric kernels shared across modules.

use nalgebra::{DMatrix, DVector};

/// Exact floating-point accumulator (Shewchuk's non-overlapping partials).
///
/// The running sum is held exactly; [`ExactSum::value`] returns it correctly
/// rounded, so the result does not depend on insertion order and two
/// accumulators can be merged without loss.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExactSum {
    partials: Vec<f64>,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        debug_assert!(value.is_finite(), "ExactSum only accepts finite values");
        let mut x = value;
        let mut kept = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    pub fn merge(&mut self, other: &ExactSum) {
        for &p in &other.partials {
            self.add(p);
        }
    }

    /// Correctly rounded value of the exact sum (round-half-even).
    pub fn value(&self) -> f64 {
        let p = &self.partials;
        let mut n = p.len();
        if n == 0 {
            return 0.0;
        }
        n -= 1;
        let mut hi = p[n];
        let mut lo = 0.0;
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = p[n];
            hi = x + y;
            let yr = hi - x;
            lo = y - yr;
            if lo != 0.0 {
                break;
            }
        }
        if n > 0 && ((lo < 0.0 && p[n - 1] < 0.0) || (lo > 0.0 && p[n - 1] > 0.0)) {
            let y = lo * 2.0;
            let x = hi + y;
            let yr = x - hi;
            if y == yr {
                hi = x;
            }
        }
        hi
    }
}

impl Extend<f64> for ExactSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl FromIterator<f64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = ExactSum::new();
        acc.extend(iter);
        acc
    }
}

pub fn exact_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<ExactSum>().value()
}

/// Dot product with error-free products (`a·b = hi + lo` via fused
/// multiply-add) accumulated exactly, then rounded once.
pub fn exact_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = ExactSum::default();
    for (x, y) in a.iter().zip(b) {
        let hi = x * y;
        if !hi.is_finite() {
            return a.iter().zip(b).map(|(x, y)| x * y).sum();
        }
        acc.add(hi);
        acc.add(x.mul_add(*y, -hi));
    }
    acc.value()
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    exact_sum(values.iter().copied()) / values.len() as f64
}

/// Population variance (divisor `n`).
pub fn population_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    exact_sum(values.iter().map(|v| (v - m) * (v - m))) / values.len() as f64
}

/// Ordinary least-squares fit through the SVD.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub params: DVector<f64>,
    /// `(XᵀX)⁻¹`, the unscaled parameter covariance.
    pub normalized_cov: DMatrix<f64>,
    pub ssr: f64,
    pub nobs: usize,
}

impl OlsFit {
    pub fn df_resid(&self) -> usize {
        self.nobs - self.params.len()
    }

    pub fn standard_error(&self, j: usize) -> f64 {
        let scale = self.ssr / self.df_resid() as f64;
        (self.normalized_cov[(j, j)] * scale).sqrt()
    }

    pub fn t_value(&self, j: usize) -> f64 {
        self.params[j] / self.standard_error(j)
    }

    /// Gaussian log-likelihood at the ML variance `ssr / n`.
    pub fn log_likelihood(&self) -> f64 {
        let n = self.nobs as f64;
        -n / 2.0 * ((2.0 * std::f64::consts::PI).ln() + (self.ssr / n).ln() + 1.0)
    }

    pub fn aic(&self) -> f64 {
        -2.0 * self.log_likelihood() + 2.0 * self.params.len() as f64
    }
}

/// Least squares with a rank check; `None` when the design is rank deficient
/// or has no residual degrees of freedom.
pub fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Option<OlsFit> {
    let (n, p) = x.shape();
    if n <= p || p == 0 {
        return None;
    }
    let svd = x.clone().svd(true, true);
    let s = &svd.singular_values;
    let s_max = s.iter().cloned().fold(0.0_f64, f64::max);
    let cutoff = s_max * (n.max(p) as f64) * f64::EPSILON;
    if s_max == 0.0 || s.iter().any(|&v| v <= cutoff) {
        return None;
    }
    let u = svd.u.as_ref()?;
    let v_t = svd.v_t.as_ref()?;
    let uty = u.transpose() * y;
    let scaled = DVector::from_iterator(p, uty.iter().zip(s.iter()).map(|(a, b)| a / b));
    let params = v_t.transpose() * scaled;
    let inv_s2 = DMatrix::from_diagonal(&s.map(|v| 1.0 / (v * v)));
    let normalized_cov = v_t.transpose() * inv_s2 * v_t;
    let resid = y - x * &params;
    let ssr = resid.dot(&resid);
    Some(OlsFit {
        params,
        normalized_cov,
        ssr,
        nobs: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sum_cancels_catastrophically_large_terms() {
        let v = [1e100, 1.0, -1e100, 1e-3];
        assert_eq!(exact_sum(v), 1.001);
        let naive: f64 = v.iter().sum();
        assert_ne!(naive, 1.001);
    }

    #[test]
    fn merge_equals_whole() {
        let values: Vec<f64> = (0..200).map(|i| (i as f64 * 0.37).sin() * 1e8 / (i + 1) as f64).collect();
        let whole: ExactSum = values.iter().copied().collect();
        let mut left: ExactSum = values[..77].iter().copied().collect();
        let right: ExactSum = values[77..].iter().copied().collect();
        left.merge(&right);
        assert_eq!(left.value(), whole.value());
    }

    #[test]
    fn empty_sum_is_zero() {
        assert_eq!(ExactSum::new().value(), 0.0);
    }

    #[test]
    fn ols_recovers_exact_line() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = DVector::from_vec(vec![1.0, 3.0, 5.0, 7.0]);
        let fit = ols(&x, &y).unwrap();
        assert!((fit.params[0] - 1.0).abs() < 1e-12);
        assert!((fit.params[1] - 2.0).abs() < 1e-12);
        assert!(fit.ssr < 1e-20);
    }

    #[test]
    fn ols_rejects_rank_deficient_design() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        assert!(ols(&x, &y).is_none());
    }
}
