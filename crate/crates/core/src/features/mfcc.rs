use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{FeatureMatrix, Frames, FrontendConfig};
use crate::error::{Error, Result};

const LOG_FLOOR: f64 = 1e-10;

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular filters equally spaced on the HTK mel scale, peak weight 1.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    weights: Vec<Vec<f64>>,
    centers: Vec<f64>,
}

impl MelFilterbank {
    pub fn new(n_filters: usize, fft_size: usize, sample_rate: u32, low_hz: f64, high_hz: f64) -> Self {
        let (lo, hi) = (hz_to_mel(low_hz), hz_to_mel(high_hz));
        let edges: Vec<f64> = (0..n_filters + 2)
            .map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (n_filters + 1) as f64))
            .collect();
        let n_bins = fft_size / 2 + 1;
        let bin_hz = sample_rate as f64 / fft_size as f64;
        let weights = (0..n_filters)
            .map(|m| {
                let (l, c, r) = (edges[m], edges[m + 1], edges[m + 2]);
                (0..n_bins)
                    .map(|b| {
                        let f = b as f64 * bin_hz;
                        if f > l && f <= c {
                            (f - l) / (c - l)
                        } else if f > c && f < r {
                            (r - f) / (r - c)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        Self { weights, centers: edges[1..=n_filters].to_vec() }
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Filter energies of a one-sided power spectrum.
    pub fn apply(&self, power: &[f64]) -> Vec<f64> {
        self.weights.iter().map(|w| w.iter().zip(power).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Reusable |FFT|^2 -> mel -> log -> orthonormal DCT-II pipeline.
pub struct MfccAnalyzer {
    fft: Arc<dyn Fft<f64>>,
    fft_size: usize,
    filterbank: MelFilterbank,
    dct: Vec<Vec<f64>>,
}

impl MfccAnalyzer {
    pub fn new(cfg: &FrontendConfig, frame_len: usize, sample_rate: u32) -> Result<Self> {
        cfg.validate()?;
        let nyquist = sample_rate as f64 / 2.0;
        if cfg.low_freq < 0.0 || cfg.low_freq >= nyquist {
            return Err(Error::Config(format!("low_freq {} outside [0, Nyquist)", cfg.low_freq)));
        }
        let fft_size = frame_len.next_power_of_two();
        let filterbank = MelFilterbank::new(cfg.n_mel_filters, fft_size, sample_rate, cfg.low_freq, nyquist);
        let m = cfg.n_mel_filters as f64;
        // rows C1..=Cn of the orthonormal DCT-II; C0 is not kept
        let dct = (1..=cfg.n_static_ceps)
            .map(|j| {
                (0..cfg.n_mel_filters)
                    .map(|k| (2.0 / m).sqrt() * (PI * j as f64 * (k as f64 + 0.5) / m).cos())
                    .collect()
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(fft_size);
        Ok(Self { fft, fft_size, filterbank, dct })
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.filterbank
    }

    pub fn power_spectrum(&self, frame: &[f64]) -> Vec<f64> {
        let mut buf = vec![Complex::new(0.0, 0.0); self.fft_size];
        for (b, &x) in buf.iter_mut().zip(frame) {
            b.re = x;
        }
        self.fft.process(&mut buf);
        buf[..self.fft_size / 2 + 1].iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn log_mel_energies(&self, frame: &[f64]) -> Vec<f64> {
        self.filterbank
            .apply(&self.power_spectrum(frame))
            .into_iter()
            .map(|e| e.max(LOG_FLOOR).ln())
            .collect()
    }

    pub fn cepstra(&self, frame: &[f64]) -> Vec<f64> {
        let log_e = self.log_mel_energies(frame);
        self.dct.iter().map(|row| row.iter().zip(&log_e).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Static cepstra C1..C{n_static_ceps} for every frame.
pub fn mfcc_static(frames: &Frames, cfg: &FrontendConfig, sample_rate: u32) -> Result<FeatureMatrix> {
    let analyzer = MfccAnalyzer::new(cfg, frames.frame_len, sample_rate)?;
    let mut data = Vec::with_capacity(frames.len() * cfg.n_static_ceps);
    for frame in frames.iter() {
        data.extend(analyzer.cepstra(frame));
    }
    let times = (0..frames.len()).map(|i| frames.time(i)).collect();
    FeatureMatrix::new(cfg.n_static_ceps, data, times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::Waveform;
    use crate::features::frame_signal;

    #[test]
    fn mel_scale_round_trip() {
        for hz in [0.0, 64.0, 700.0, 4000.0, 8000.0] {
            assert!((mel_to_hz(hz_to_mel(hz)) - hz).abs() < 1e-9);
        }
        assert!((hz_to_mel(700.0) - 2595.0 * 2f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn nineteen_statics() {
        let w = Waveform::new((0..800).map(|n| (n as f64 * 0.3).sin() * 0.2).collect(), 16000).unwrap();
        let cfg = FrontendConfig::default();
        let f = mfcc_static(&frame_signal(&w, &cfg).unwrap(), &cfg, 16000).unwrap();
        assert_eq!(f.n_dims(), 19);
        assert_eq!(f.n_rows(), 3);
    }

    #[test]
    fn zero_frames_hit_the_floor() {
        let cfg = FrontendConfig::default();
        let a = MfccAnalyzer::new(&cfg, 400, 16000).unwrap();
        let zero = vec![0.0; 400];
        assert!(a.log_mel_energies(&zero).iter().all(|&e| e == LOG_FLOOR.ln()));
        // constant log spectrum only feeds C0, which is dropped
        let c = a.cepstra(&zero);
        assert_eq!(c, a.cepstra(&zero));
        assert!(c.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn filterbank_spans_low_freq_to_nyquist() {
        let fb = MelFilterbank::new(27, 512, 16000, 64.0, 8000.0);
        assert_eq!(fb.len(), 27);
        assert!(fb.centers()[0] > 64.0);
        assert!(fb.centers()[26] < 8000.0);
        assert!(fb.centers().windows(2).all(|w| w[0] < w[1]));
    }
}
