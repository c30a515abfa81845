//! Brute-force reference implementations shared by the test targets.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdsv::features::FeatureMatrix;
use tdsv::gmm::DiagGmm;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_gmm(rng: &mut ChaCha8Rng, k: usize, d: usize) -> DiagGmm {
    let mut w: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    let means = (0..k * d).map(|_| rng.random_range(-2.0..2.0)).collect();
    let vars = (0..k * d).map(|_| rng.random_range(0.3..2.5)).collect();
    DiagGmm::new(w, means, vars).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, d: usize, scale: f64) -> FeatureMatrix {
    let data = (0..rows * d).map(|_| rng.random_range(-scale..scale)).collect();
    FeatureMatrix::new(d, data, Vec::new()).unwrap()
}

/// log of the plain sum of weighted densities, each density a product of 1-D normals.
pub fn naive_log_likelihood(m: &DiagGmm, x: &[f64]) -> f64 {
    let mut total = 0.0;
    for c in 0..m.n_components() {
        let mut density = m.weights()[c];
        for (j, &xj) in x.iter().enumerate() {
            let (mu, var) = (m.mean(c)[j], m.variance(c)[j]);
            density *= (-(xj - mu).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
        }
        total += density;
    }
    total.ln()
}

pub fn naive_llr(spk: &DiagGmm, ubm: &DiagGmm, x: &FeatureMatrix) -> f64 {
    let t = x.n_rows();
    (0..t).map(|i| naive_log_likelihood(spk, x.row(i)) - naive_log_likelihood(ubm, x.row(i))).sum::<f64>() / t as f64
}

/// y[t] = 0.98 y[t-1] + 0.2 x[t] + 0.1 x[t-1] - 0.1 x[t-3] - 0.2 x[t-4]
pub fn naive_rasta(x: &[f64]) -> Vec<f64> {
    let at = |t: isize| if t >= 0 { x[t as usize] } else { 0.0 };
    let mut y: Vec<f64> = Vec::with_capacity(x.len());
    for t in 0..x.len() as isize {
        let prev = if t > 0 { y[t as usize - 1] } else { 0.0 };
        y.push(0.98 * prev + 0.1 * (2.0 * at(t) + at(t - 1) - at(t - 3) - 2.0 * at(t - 4)));
    }
    y
}

/// Regression delta with edge replication.
pub fn naive_delta(c: &[f64], w: usize) -> Vec<f64> {
    let n = c.len() as isize;
    let clamp = |t: isize| c[t.clamp(0, n - 1) as usize];
    let denom: f64 = 2.0 * (1..=w).map(|k| (k * k) as f64).sum::<f64>();
    (0..n)
        .map(|t| (1..=w as isize).map(|k| k as f64 * (clamp(t + k) - clamp(t - k))).sum::<f64>() / denom)
        .collect()
}

pub fn naive_convolve(x: &[f64], h: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; x.len()];
    for (n, yn) in y.iter_mut().enumerate() {
        for (k, &hk) in h.iter().enumerate() {
            if k <= n {
                *yn += hk * x[n - k];
            }
        }
    }
    y
}

pub fn naive_distort(x: f64, depth: u32) -> f64 {
    let mut y = x;
    for _ in 0..depth {
        y = (PI / 2.0 * y).sin();
    }
    y
}

/// Rates at threshold `th` by direct counting: (miss, false alarm).
pub fn rates(tar: &[f64], non: &[f64], th: f64) -> (f64, f64) {
    let miss = tar.iter().filter(|&&s| s < th).count() as f64 / tar.len() as f64;
    let fa = non.iter().filter(|&&s| s >= th).count() as f64 / non.len() as f64;
    (miss, fa)
}

fn sweep(tar: &[f64], non: &[f64]) -> Vec<(f64, f64)> {
    let mut th: Vec<f64> = tar.iter().chain(non).copied().collect();
    th.sort_by(|a, b| a.partial_cmp(b).unwrap());
    th.dedup();
    th.push(f64::INFINITY);
    th.into_iter().map(|t| rates(tar, non, t)).collect()
}

/// EER in percent: first sweep point where miss catches up with false
/// alarms, interpolated linearly with its predecessor.
pub fn brute_eer(tar: &[f64], non: &[f64]) -> f64 {
    let pts = sweep(tar, non);
    for i in 0..pts.len() {
        let (m, f) = pts[i];
        if m >= f {
            if m == f || i == 0 {
                return 100.0 * m;
            }
            let (pm, pf) = pts[i - 1];
            let t = (pf - pm) / ((pf - pm) + (m - f));
            return 100.0 * (pm + t * (m - pm));
        }
    }
    unreachable!("reject-all point has miss 1, fa 0")
}

pub fn brute_min_dcf(tar: &[f64], non: &[f64], c_miss: f64, c_fa: f64, p_target: f64) -> f64 {
    sweep(tar, non)
        .into_iter()
        .chain([rates(tar, non, f64::NEG_INFINITY)])
        .map(|(m, f)| c_miss * m * p_target + c_fa * f * (1.0 - p_target))
        .fold(f64::INFINITY, f64::min)
}

pub fn random_scores(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> Vec<f64> {
    // quantized so that ties occur
    (0..n).map(|_| ((rng.random_range(-3.0..3.0) + shift) * 8.0f64).round() / 8.0).collect()
}

/// Peak bin frequency of a Hann-windowed magnitude spectrum with parabolic refinement.
pub fn peak_frequency(x: &[f64], sample_rate: u32) -> f64 {
    use rustfft::{num_complex::Complex, FftPlanner};
    let n = x.len().next_power_of_two() * 4;
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|i| {
            let v = if i < x.len() { x[i] * (0.5 - 0.5 * (2.0 * PI * i as f64 / x.len() as f64).cos()) } else { 0.0 };
            Complex::new(v, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mag: Vec<f64> = buf[..n / 2].iter().map(|c| c.norm()).collect();
    let k = (1..mag.len() - 1).max_by(|&a, &b| mag[a].partial_cmp(&mag[b]).unwrap()).unwrap();
    let (a, b, c) = (mag[k - 1].ln(), mag[k].ln(), mag[k + 1].ln());
    let off = 0.5 * (a - c) / (a - 2.0 * b + c);
    (k as f64 + off) * sample_rate as f64 / n as f64
}

pub fn sine(n: usize, sample_rate: u32, hz: f64, amp: f64) -> Vec<f64> {
    (0..n).map(|i| amp * (2.0 * PI * hz * i as f64 / sample_rate as f64).sin()).collect()
}
