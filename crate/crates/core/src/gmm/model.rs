use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Mixture weights, means and diagonal variances, row-major `K x D`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagGmm {
    k: usize,
    d: usize,
    weights: Vec<f64>,
    means: Vec<f64>,
    variances: Vec<f64>,
    precisions: Vec<f64>,
    /// `ln w_k - 0.5 (D ln 2 pi + sum_d ln var_kd)`
    log_norms: Vec<f64>,
}

impl DiagGmm {
    pub fn new(weights: Vec<f64>, means: Vec<f64>, variances: Vec<f64>) -> Result<Self> {
        let k = weights.len();
        if k == 0 {
            return Err(Error::Validation("mixture has no components".into()));
        }
        if means.len() % k != 0 || means.is_empty() {
            return Err(Error::Validation(format!("{} means do not split into {k} components", means.len())));
        }
        let d = means.len() / k;
        if variances.len() != k * d {
            return Err(Error::Validation(format!(
                "expected {} variances, found {}",
                k * d,
                variances.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Validation("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() >= 1e-10 {
            return Err(Error::Validation(format!("weights sum to {total}, not 1")));
        }
        if means.iter().any(|m| !m.is_finite()) {
            return Err(Error::Validation("non-finite mean".into()));
        }
        if variances.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Validation("variances must be finite and positive".into()));
        }
        let precisions = variances.iter().map(|v| 1.0 / v).collect();
        let ln_2pi = (2.0 * PI).ln();
        let log_norms = (0..k)
            .map(|c| {
                let log_det: f64 = variances[c * d..(c + 1) * d].iter().map(|v| v.ln()).sum();
                weights[c].ln() - 0.5 * (d as f64 * ln_2pi + log_det)
            })
            .collect();
        Ok(Self { k, d, weights, means, variances, precisions, log_norms })
    }

    pub fn n_components(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn mean(&self, c: usize) -> &[f64] {
        &self.means[c * self.d..(c + 1) * self.d]
    }

    pub fn variance(&self, c: usize) -> &[f64] {
        &self.variances[c * self.d..(c + 1) * self.d]
    }

    /// Same weights and variances, new means.
    pub fn with_means(&self, means: Vec<f64>) -> Result<Self> {
        Self::new(self.weights.clone(), means, self.variances.clone())
    }

    pub(crate) fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.d {
            return Err(Error::domain(format!("feature dimension {d} does not match model dimension {}", self.d)));
        }
        Ok(())
    }

    /// Per-component `ln w_k + ln N(x; mu_k, var_k)` written into `out`.
    pub(crate) fn component_log_joint(&self, x: &[f64], out: &mut [f64]) {
        for (c, o) in out.iter_mut().enumerate() {
            let range = c * self.d..(c + 1) * self.d;
            *o = self.log_norms[c]
                - 0.5 * mahalanobis(x, &self.means[range.clone()], &self.precisions[range]);
        }
    }

    /// Unchecked-dimension log density of one frame.
    pub(crate) fn log_density(&self, x: &[f64], scratch: &mut [f64]) -> f64 {
        self.component_log_joint(x, scratch);
        log_sum_exp(scratch)
    }
}

/// `sum_d (x_d - mu_d)^2 * prec_d`, four independent lanes.
#[inline]
pub(crate) fn mahalanobis(x: &[f64], mu: &[f64], prec: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let xs = x.chunks_exact(4);
    let ms = mu.chunks_exact(4);
    let ps = prec.chunks_exact(4);
    let (xr, mr, pr) = (xs.remainder(), ms.remainder(), ps.remainder());
    for ((xc, mc), pc) in xs.zip(ms).zip(ps) {
        for l in 0..4 {
            let diff = xc[l] - mc[l];
            acc[l] += diff * diff * pc[l];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for ((a, b), p) in xr.iter().zip(mr).zip(pr) {
        let diff = a - b;
        s += diff * diff * p;
    }
    s
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `ln sum_k w_k N(frame; mu_k, diag var_k)`.
pub fn gmm_log_likelihood(model: &DiagGmm, frame: &[f64]) -> Result<f64> {
    model.check_dim(frame.len())?;
    let mut scratch = vec![0.0; model.k];
    Ok(model.log_density(frame, &mut scratch))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_normal_at_mode() {
        let m = DiagGmm::new(vec![1.0], vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let ll = gmm_log_likelihood(&m, &[0.0, 0.0]).unwrap();
        assert!((ll + (2.0 * PI).ln()).abs() < 1e-15);
        assert!((ll + 1.837877).abs() < 1e-6);
    }

    #[test]
    fn duplicate_components_collapse() {
        let single = DiagGmm::new(vec![1.0], vec![0.3, -1.0], vec![0.5, 2.0]).unwrap();
        let double = DiagGmm::new(vec![0.5, 0.5], vec![0.3, -1.0, 0.3, -1.0], vec![0.5, 2.0, 0.5, 2.0]).unwrap();
        let x = [1.1, 0.4];
        let a = gmm_log_likelihood(&single, &x).unwrap();
        let b = gmm_log_likelihood(&double, &x).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn validation() {
        assert!(matches!(DiagGmm::new(vec![], vec![], vec![]), Err(Error::Validation(_))));
        assert!(DiagGmm::new(vec![0.9], vec![0.0], vec![1.0]).is_err());
        assert!(DiagGmm::new(vec![1.0], vec![0.0], vec![0.0]).is_err());
        assert!(DiagGmm::new(vec![1.0], vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(DiagGmm::new(vec![1.5, -0.5], vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let m = DiagGmm::new(vec![1.0], vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(matches!(gmm_log_likelihood(&m, &[0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_weight_component_is_ignored() {
        let m = DiagGmm::new(vec![1.0, 0.0], vec![0.0, 5.0], vec![1.0, 1.0]).unwrap();
        let single = DiagGmm::new(vec![1.0], vec![0.0], vec![1.0]).unwrap();
        assert_eq!(gmm_log_likelihood(&m, &[0.2]).unwrap(), gmm_log_likelihood(&single, &[0.2]).unwrap());
    }
}
