//! Duration-preserving pitch shift: phase-vocoder time stretch by the pitch
//! ratio, then resampling back to the input length.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::audio::Waveform;
use crate::error::{Error, Result};

fn princarg(phase: f64) -> f64 {
    phase - 2.0 * PI * (phase / (2.0 * PI)).round()
}

fn lerp_at(samples: &[f64], offset: isize, pos: f64) -> f64 {
    let i0 = pos.floor();
    let frac = pos - i0;
    let get = |i: isize| {
        let j = i - offset;
        if j >= 0 && (j as usize) < samples.len() {
            samples[j as usize]
        } else {
            0.0
        }
    };
    let a = get(i0 as isize);
    if frac == 0.0 {
        a
    } else {
        a + frac * (get(i0 as isize + 1) - a)
    }
}

/// Phase-vocoder stretch by `factor` (> 1 lengthens). `pad` zeros are assumed on
/// both sides of the input; the result covers the padded, stretched timeline.
pub fn time_stretch(samples: &[f64], factor: f64, fft_size: usize, pad: usize) -> Vec<f64> {
    let n = fft_size;
    let synth_hop = n / 4;
    let analysis_hop = synth_hop as f64 / factor;
    let window: Vec<f64> = (0..n).map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos()).collect();
    let total = (samples.len() + 2 * pad) as f64;
    let frames = (total / analysis_hop).ceil() as usize + 1;
    let out_len = (frames - 1) * synth_hop + n;

    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let bins = n / 2 + 1;
    let omega: Vec<f64> = (0..bins).map(|k| 2.0 * PI * k as f64 / n as f64).collect();

    let mut out = vec![0.0; out_len];
    let mut norm = vec![0.0; out_len];
    let mut prev_phase = vec![0.0; bins];
    let mut synth_phase = vec![0.0; bins];
    let mut buf = vec![Complex::new(0.0, 0.0); n];

    for m in 0..frames {
        let start = m as f64 * analysis_hop;
        for (j, b) in buf.iter_mut().enumerate() {
            *b = Complex::new(window[j] * lerp_at(samples, pad as isize, start + j as f64), 0.0);
        }
        fwd.process(&mut buf);
        for k in 0..bins {
            let (mag, phase) = buf[k].to_polar();
            if m == 0 {
                synth_phase[k] = phase;
            } else {
                let deviation = princarg(phase - prev_phase[k] - omega[k] * analysis_hop);
                synth_phase[k] += (omega[k] + deviation / analysis_hop) * synth_hop as f64;
            }
            prev_phase[k] = phase;
            buf[k] = Complex::from_polar(mag, synth_phase[k]);
        }
        for k in bins..n {
            buf[k] = buf[n - k].conj();
        }
        inv.process(&mut buf);
        let at = m * synth_hop;
        for j in 0..n {
            out[at + j] += window[j] * buf[j].re / n as f64;
            norm[at + j] += window[j] * window[j];
        }
    }
    for (y, w) in out.iter_mut().zip(&norm) {
        *y = if *w > 1e-9 { *y / w } else { 0.0 };
    }
    out
}

/// Shifts pitch by whole semitones while keeping the sample count.
pub fn pitch_shift(wave: &Waveform, semitones: i32) -> Result<Waveform> {
    if !(-12..=12).contains(&semitones) {
        return Err(Error::domain(format!("pitch shift of {semitones} semitones outside [-12, 12]")));
    }
    if wave.is_empty() {
        return Ok(wave.clone());
    }
    let ratio = 2f64.powf(semitones as f64 / 12.0);
    let fft_size = if wave.sample_rate >= 16000 { 1024 } else { 512 };
    let pad = fft_size;
    let stretched = time_stretch(&wave.samples, ratio, fft_size, pad);
    let samples = (0..wave.len())
        .map(|i| lerp_at(&stretched, 0, (pad + i) as f64 * ratio))
        .collect();
    Waveform::new(samples, wave.sample_rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_of_range_rejected() {
        let w = Waveform::new(vec![0.0; 100], 16000).unwrap();
        assert!(matches!(pitch_shift(&w, 13), Err(Error::Domain(_))));
        assert!(pitch_shift(&w, -12).is_ok());
    }

    #[test]
    fn zero_shift_round_trips() {
        let samples: Vec<f64> = (0..8000).map(|n| ((n * 7919 % 1000) as f64 / 500.0 - 1.0) * 0.5).collect();
        let w = Waveform::new(samples, 16000).unwrap();
        let out = pitch_shift(&w, 0).unwrap();
        assert_eq!(out.len(), w.len());
        let rms = (out.samples.iter().zip(&w.samples).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
            / w.len() as f64)
            .sqrt();
        assert!(rms < 1e-6, "rms {rms}");
    }

    #[test]
    fn preserves_length() {
        let w = Waveform::new(vec![0.1; 12345], 8000).unwrap();
        for st in [-5, 1, 2, 12] {
            assert_eq!(pitch_shift(&w, st).unwrap().len(), 12345);
        }
    }
}
