use serde::{Deserialize, Serialize};

use super::model::DiagGmm;
use super::stats::SuffStats;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapConfig {
    pub relevance: f64,
    pub iterations: usize,
    pub adapt_means: bool,
    pub adapt_weights: bool,
    pub adapt_variances: bool,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self { relevance: 10.0, iterations: 3, adapt_means: true, adapt_weights: false, adapt_variances: false }
    }
}

impl MapConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.relevance > 0.0) {
            return Err(Error::Config("relevance must be positive".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Config("MAP needs at least one iteration".into()));
        }
        Ok(())
    }
}

/// MAP adaptation from `ubm` toward `enrollment`.
///
/// Each pass recomputes responsibilities against the current adapted model and
/// interpolates with the UBM prior using `alpha_k = n_k / (n_k + relevance)`.
pub fn map_adapt(ubm: &DiagGmm, enrollment: &FeatureMatrix, cfg: &MapConfig) -> Result<DiagGmm> {
    cfg.validate()?;
    ubm.check_dim(enrollment.n_dims())?;
    if enrollment.n_rows() == 0 {
        return Err(Error::domain("no enrollment frames"));
    }
    let (k, d) = (ubm.n_components(), ubm.dim());
    let mut model = ubm.clone();
    for _ in 0..cfg.iterations {
        let stats = SuffStats::accumulate(&model, enrollment, cfg.adapt_variances)?;
        let total: f64 = stats.occupancy.iter().sum();
        let mut means = ubm.means().to_vec();
        let mut weights = ubm.weights().to_vec();
        let mut vars = ubm.variances().to_vec();
        for c in 0..k {
            let n = stats.occupancy[c];
            if n == 0.0 {
                continue;
            }
            let alpha = n / (n + cfg.relevance);
            if cfg.adapt_means {
                for j in 0..d {
                    let i = c * d + j;
                    means[i] = alpha * (stats.first[i] / n) + (1.0 - alpha) * ubm.means()[i];
                }
            }
            if cfg.adapt_weights {
                weights[c] = alpha * n / total + (1.0 - alpha) * ubm.weights()[c];
            }
            if let Some(second) = stats.second.as_ref() {
                for j in 0..d {
                    let i = c * d + j;
                    let prior = ubm.variances()[i] + ubm.means()[i] * ubm.means()[i];
                    let v = alpha * (second[i] / n) + (1.0 - alpha) * prior - means[i] * means[i];
                    vars[i] = v.max(1e-4 * ubm.variances()[i]);
                }
            }
        }
        if cfg.adapt_weights {
            let s: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= s);
        }
        model = DiagGmm::new(weights, means, vars)?;
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ubm() -> DiagGmm {
        DiagGmm::new(vec![1.0], vec![0.0], vec![1.0]).unwrap()
    }

    #[test]
    fn single_component_closed_form() {
        let data = FeatureMatrix::new(1, vec![1.0; 10], Vec::new()).unwrap();
        let cfg = MapConfig { iterations: 1, ..Default::default() };
        let adapted = map_adapt(&ubm(), &data, &cfg).unwrap();
        assert!((adapted.means()[0] - 0.5).abs() < 1e-15);
        assert_eq!(adapted.variances(), ubm().variances());
    }

    #[test]
    fn component_without_data_keeps_ubm_mean() {
        let ubm = DiagGmm::new(vec![0.5, 0.5], vec![0.0, 1e4], vec![1.0, 1.0]).unwrap();
        let data = FeatureMatrix::new(1, vec![0.1, -0.2, 0.3], Vec::new()).unwrap();
        let adapted = map_adapt(&ubm, &data, &MapConfig::default()).unwrap();
        assert_eq!(adapted.means()[1], 1e4);
        assert_ne!(adapted.means()[0], 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let data = FeatureMatrix::new(2, vec![0.0, 0.0], Vec::new()).unwrap();
        assert!(matches!(map_adapt(&ubm(), &data, &MapConfig::default()), Err(Error::Domain(_))));
        let data = FeatureMatrix::new(1, vec![0.0], Vec::new()).unwrap();
        let bad = MapConfig { relevance: 0.0, ..Default::default() };
        assert!(matches!(map_adapt(&ubm(), &data, &bad), Err(Error::Config(_))));
    }

    #[test]
    fn weight_and_variance_adaptation_keep_a_valid_model() {
        let ubm = DiagGmm::new(vec![0.5, 0.5], vec![-1.0, 1.0], vec![1.0, 1.0]).unwrap();
        let data = FeatureMatrix::new(1, vec![0.9, 1.1, 1.3, 0.7, -1.0], Vec::new()).unwrap();
        let cfg = MapConfig { adapt_weights: true, adapt_variances: true, ..Default::default() };
        let m = map_adapt(&ubm, &data, &cfg).unwrap();
        assert!(m.weights()[1] > m.weights()[0]);
        assert!(m.variances()[1] < 1.0);
    }
}
