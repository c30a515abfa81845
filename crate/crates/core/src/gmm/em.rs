//! Background-model training: binary splitting from a single Gaussian, a few
//! k-means passes and EM refinement after every split, then EM to convergence
//! at full size.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::DiagGmm;
use super::stats::SuffStats;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

const RELATIVE_FLOOR: f64 = 1e-4;
const ABSOLUTE_FLOOR: f64 = 1e-8;
const SPLIT_OFFSET: f64 = 0.2;
const DEGENERATE_MASS: f64 = 1e-10;
const KMEANS_ITERATIONS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmConfig {
    pub max_iterations: usize,
    /// Stop once the relative log-likelihood gain falls below this.
    pub rel_tol: f64,
    pub seed: u64,
    /// EM passes run after each split before the next.
    pub split_iterations: usize,
}

impl Default for EmConfig {
    fn default() -> Self {
        Self { max_iterations: 20, rel_tol: 1e-5, seed: 0, split_iterations: 4 }
    }
}

impl EmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::Config("rel_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmReport {
    /// Total data log-likelihood before each M-step of the final stage, plus the final model's.
    pub log_likelihood: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<String>,
}

struct Trainer<'a> {
    data: &'a FeatureMatrix,
    floor: Vec<f64>,
    /// Global per-dimension variance, used to whiten k-means distances.
    scale: Vec<f64>,
    rng: ChaCha8Rng,
    warnings: Vec<String>,
}

impl Trainer<'_> {
    fn m_step(&mut self, model: &DiagGmm, stats: &SuffStats) -> Result<DiagGmm> {
        let (k, d) = (stats.k, stats.d);
        let n_total: f64 = stats.occupancy.iter().sum();
        let second = stats.second.as_ref().expect("EM needs second-order stats");
        let mut weights = vec![0.0; k];
        let mut means = vec![0.0; k * d];
        let mut vars = vec![0.0; k * d];
        let mut degenerate = Vec::new();
        for c in 0..k {
            let n = stats.occupancy[c];
            if n < DEGENERATE_MASS {
                degenerate.push(c);
                means[c * d..(c + 1) * d].copy_from_slice(model.mean(c));
                vars[c * d..(c + 1) * d].copy_from_slice(model.variance(c));
                continue;
            }
            weights[c] = n / n_total;
            for j in 0..d {
                let i = c * d + j;
                let mu = stats.first[i] / n;
                means[i] = mu;
                vars[i] = (second[i] / n - mu * mu).max(self.floor[j]);
            }
        }
        for &c in &degenerate {
            let donor = (0..k)
                .filter(|x| !degenerate.contains(x))
                .max_by(|&a, &b| {
                    let va: f64 = vars[a * d..(a + 1) * d].iter().sum();
                    let vb: f64 = vars[b * d..(b + 1) * d].iter().sum();
                    va.total_cmp(&vb)
                })
                .ok_or_else(|| Error::Numeric("every mixture component lost its data".into()))?;
            self.warnings.push(format!("component {c} had no responsibility mass; re-seeded from component {donor}"));
            self.split_into(&mut weights, &mut means, &mut vars, d, donor, c);
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        DiagGmm::new(weights, means, vars).map_err(|e| Error::Numeric(format!("M-step produced invalid model: {e}")))
    }

    /// Moves `donor` by -offset and writes its +offset twin into `slot`, halving the weight.
    fn split_into(&mut self, weights: &mut [f64], means: &mut [f64], vars: &mut [f64], d: usize, donor: usize, slot: usize) {
        weights[donor] *= 0.5;
        weights[slot] = weights[donor];
        for j in 0..d {
            let sd = vars[donor * d + j].sqrt();
            let step = if self.rng.random_bool(0.5) { SPLIT_OFFSET * sd } else { -SPLIT_OFFSET * sd };
            let mu = means[donor * d + j];
            means[slot * d + j] = mu + step;
            means[donor * d + j] = mu - step;
            vars[slot * d + j] = vars[donor * d + j];
        }
    }

    fn split(&mut self, model: &DiagGmm, target: usize) -> Result<DiagGmm> {
        let (k, d) = (model.n_components(), model.dim());
        let n_new = (target - k).min(k);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| model.weights()[b].total_cmp(&model.weights()[a]).then(a.cmp(&b)));
        let mut weights = model.weights().to_vec();
        let mut means = model.means().to_vec();
        let mut vars = model.variances().to_vec();
        weights.resize(k + n_new, 0.0);
        means.resize((k + n_new) * d, 0.0);
        vars.resize((k + n_new) * d, 0.0);
        for (i, &donor) in order.iter().take(n_new).enumerate() {
            self.split_into(&mut weights, &mut means, &mut vars, d, donor, k + i);
        }
        DiagGmm::new(weights, means, vars)
    }

    /// Lloyd iterations on whitened distances. Hard clustering breaks the
    /// symmetry of a fresh split far faster than soft EM does.
    fn kmeans(&self, model: DiagGmm, iterations: usize) -> Result<DiagGmm> {
        let (k, d) = (model.n_components(), model.dim());
        let inv: Vec<f64> = self.scale.iter().map(|v| 1.0 / v).collect();
        let mut means = model.means().to_vec();
        let mut counts = vec![0usize; k];
        let mut sum = vec![0.0; k * d];
        let mut sq = vec![0.0; k * d];
        for _ in 0..iterations {
            counts.iter_mut().for_each(|c| *c = 0);
            sum.iter_mut().for_each(|s| *s = 0.0);
            sq.iter_mut().for_each(|s| *s = 0.0);
            for r in self.data.rows() {
                let mut best = (f64::INFINITY, 0);
                for c in 0..k {
                    let mu = &means[c * d..(c + 1) * d];
                    let dist: f64 = r.iter().zip(mu).zip(&inv).map(|((x, m), w)| (x - m) * (x - m) * w).sum();
                    if dist < best.0 {
                        best = (dist, c);
                    }
                }
                let c = best.1;
                counts[c] += 1;
                for (j, &x) in r.iter().enumerate() {
                    sum[c * d + j] += x;
                    sq[c * d + j] += x * x;
                }
            }
            for c in (0..k).filter(|&c| counts[c] > 0) {
                for j in 0..d {
                    means[c * d + j] = sum[c * d + j] / counts[c] as f64;
                }
            }
        }
        let n = self.data.n_rows() as f64;
        let mut weights = model.weights().to_vec();
        let mut vars = model.variances().to_vec();
        for c in (0..k).filter(|&c| counts[c] > 1) {
            weights[c] = counts[c] as f64 / n;
            for j in 0..d {
                let i = c * d + j;
                let mu = sum[i] / counts[c] as f64;
                vars[i] = (sq[i] / counts[c] as f64 - mu * mu).max(self.floor[j]);
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        DiagGmm::new(weights, means, vars)
    }

    fn iterate(&mut self, model: DiagGmm, iterations: usize) -> Result<DiagGmm> {
        let mut model = model;
        for _ in 0..iterations {
            let stats = SuffStats::accumulate(&model, self.data, true)?;
            model = self.m_step(&model, &stats)?;
        }
        Ok(model)
    }
}

fn check_finite(ll: f64) -> Result<f64> {
    if ll.is_finite() {
        Ok(ll)
    } else {
        Err(Error::Numeric(format!("training log-likelihood is {ll}")))
    }
}

/// Trains a `k`-component background model; see [`train_ubm_with_report`].
pub fn train_ubm(data: &FeatureMatrix, k: usize, cfg: &EmConfig) -> Result<DiagGmm> {
    train_ubm_with_report(data, k, cfg).map(|(m, _)| m)
}

pub fn train_ubm_with_report(data: &FeatureMatrix, k: usize, cfg: &EmConfig) -> Result<(DiagGmm, EmReport)> {
    cfg.validate()?;
    if k == 0 {
        return Err(Error::Config("component count must be positive".into()));
    }
    let (n, d) = (data.n_rows(), data.n_dims());
    if n < 10 * k {
        return Err(Error::domain(format!("{n} frames is too few for {k} components (need {})", 10 * k)));
    }

    let mut mean = vec![0.0; d];
    for r in data.rows() {
        for (m, x) in mean.iter_mut().zip(r) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut var = vec![0.0; d];
    for r in data.rows() {
        for ((v, x), m) in var.iter_mut().zip(r).zip(&mean) {
            *v += (x - m) * (x - m);
        }
    }
    var.iter_mut().for_each(|v| *v /= n as f64);
    let floor: Vec<f64> = var.iter().map(|v| (RELATIVE_FLOOR * v).max(ABSOLUTE_FLOOR)).collect();
    let init_var: Vec<f64> = var.iter().zip(&floor).map(|(v, f)| v.max(*f)).collect();

    let mut trainer = Trainer { data, floor, scale: init_var.clone(), rng: ChaCha8Rng::seed_from_u64(cfg.seed), warnings: Vec::new() };
    let mut model = DiagGmm::new(vec![1.0], mean, init_var)?;
    while model.n_components() < k {
        model = trainer.split(&model, k)?;
        model = trainer.kmeans(model, KMEANS_ITERATIONS)?;
        if model.n_components() < k {
            model = trainer.iterate(model, cfg.split_iterations)?;
        }
    }

    let mut report = EmReport::default();
    for _ in 0..cfg.max_iterations {
        let stats = SuffStats::accumulate(&model, data, true)?;
        let ll = check_finite(stats.log_likelihood)?;
        if let Some(&prev) = report.log_likelihood.last() {
            if (ll - prev) / prev.abs() < cfg.rel_tol {
                report.log_likelihood.push(ll);
                report.converged = true;
                break;
            }
        }
        report.log_likelihood.push(ll);
        model = trainer.m_step(&model, &stats)?;
        report.iterations += 1;
    }
    if !report.converged {
        let stats = SuffStats::accumulate(&model, data, false)?;
        report.log_likelihood.push(check_finite(stats.log_likelihood)?);
    }
    report.warnings = trainer.warnings;
    for w in &report.warnings {
        log::warn!("{w}");
    }
    Ok((model, report))
}
