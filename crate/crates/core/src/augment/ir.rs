use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::audio::Waveform;
use crate::error::{Error, Result};

const DIRECT_MAX_TAPS: usize = 32;

/// Linear convolution `x * h`, keeping the first `x.len()` samples.
/// Short filters run directly, longer ones through the FFT.
pub fn convolve_truncated(x: &[f64], h: &[f64]) -> Vec<f64> {
    if x.is_empty() || h.is_empty() {
        return vec![0.0; x.len()];
    }
    if h.len() <= DIRECT_MAX_TAPS {
        return (0..x.len())
            .map(|n| h.iter().take(n + 1).enumerate().map(|(k, &hk)| hk * x[n - k]).sum())
            .collect();
    }
    let size = (x.len() + h.len() - 1).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let load = |v: &[f64]| {
        let mut buf = vec![Complex::new(0.0, 0.0); size];
        for (b, &s) in buf.iter_mut().zip(v) {
            b.re = s;
        }
        buf
    };
    let mut xs = load(x);
    let mut hs = load(h);
    fwd.process(&mut xs);
    fwd.process(&mut hs);
    for (a, b) in xs.iter_mut().zip(&hs) {
        *a *= b;
    }
    inv.process(&mut xs);
    xs[..x.len()].iter().map(|c| c.re / size as f64).collect()
}

/// Convolves with `ir`; if the result leaves [-1, 1] it is rescaled to the input peak.
pub fn apply_ir(wave: &Waveform, ir: &Waveform) -> Result<Waveform> {
    if ir.is_empty() {
        return Err(Error::domain("impulse response is empty"));
    }
    wave.require_same_rate(ir)?;
    let mut y = convolve_truncated(&wave.samples, &ir.samples);
    let peak = y.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if peak > 1.0 {
        let g = wave.peak() / peak;
        y.iter_mut().for_each(|s| *s *= g);
    }
    Waveform::new(y, wave.sample_rate)
}

/// Exponentially decaying noise tail behind a unit direct path.
pub fn synth_hall_ir(sample_rate: u32, seed: u64) -> Waveform {
    let sr = sample_rate as f64;
    let rt60 = 0.6;
    let len = (0.4 * sr) as usize;
    let predelay = (0.01 * sr) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = vec![0.0; len];
    h[0] = 1.0;
    for (n, v) in h.iter_mut().enumerate().skip(predelay) {
        let t = n as f64 / sr;
        let g: f64 = rng.sample(StandardNormal);
        *v = 0.3 * g * (-6.907_755_3 * t / rt60).exp();
    }
    Waveform { samples: h, sample_rate }
}
