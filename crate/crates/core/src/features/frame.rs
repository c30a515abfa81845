use std::f64::consts::PI;

use super::FrontendConfig;
use crate::audio::Waveform;
use crate::error::{Error, Result};

/// Equal-length analysis frames, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Frames {
    pub frame_len: usize,
    pub hop: usize,
    pub sample_rate: u32,
    data: Vec<f64>,
}

impl Frames {
    pub fn len(&self) -> usize {
        self.data.len() / self.frame_len
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn frame(&self, i: usize) -> &[f64] {
        &self.data[i * self.frame_len..(i + 1) * self.frame_len]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.frame_len)
    }

    /// Centre of frame `i`, seconds.
    pub fn time(&self, i: usize) -> f64 {
        (i * self.hop) as f64 / self.sample_rate as f64
            + 0.5 * self.frame_len as f64 / self.sample_rate as f64
    }
}

/// `y[n] = x[n] - coef * x[n-1]`, with `y[0] = x[0]`.
pub fn pre_emphasis(samples: &[f64], coef: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut prev = 0.0;
    for &x in samples {
        out.push(x - coef * prev);
        prev = x;
    }
    out
}

/// Symmetric Hamming window.
pub fn hamming(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    (0..len).map(|n| 0.54 - 0.46 * (2.0 * PI * n as f64 / (len - 1) as f64).cos()).collect()
}

/// Pre-emphasis, then `1 + floor((N - L) / H)` Hamming-windowed frames.
pub fn frame_signal(wave: &Waveform, cfg: &FrontendConfig) -> Result<Frames> {
    let len = cfg.frame_len_samples(wave.sample_rate);
    let hop = cfg.hop_samples(wave.sample_rate);
    if len == 0 || hop == 0 {
        return Err(Error::domain("frame length and hop must cover at least one sample"));
    }
    if wave.len() < len {
        return Err(Error::domain(format!(
            "waveform of {} samples is shorter than one {len}-sample frame",
            wave.len()
        )));
    }
    let emphasized = pre_emphasis(&wave.samples, cfg.pre_emphasis);
    let window = hamming(len);
    let count = 1 + (wave.len() - len) / hop;
    let mut data = Vec::with_capacity(count * len);
    for i in 0..count {
        let start = i * hop;
        data.extend(emphasized[start..start + len].iter().zip(&window).map(|(x, w)| x * w));
    }
    Ok(Frames { frame_len: len, hop, sample_rate: wave.sample_rate, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> FrontendConfig {
        FrontendConfig::default()
    }

    #[test]
    fn frame_counts() {
        let w = Waveform::new(vec![0.1; 400], 16000).unwrap();
        assert_eq!(frame_signal(&w, &cfg()).unwrap().len(), 1);
        let w = Waveform::new(vec![0.1; 560], 16000).unwrap();
        assert_eq!(frame_signal(&w, &cfg()).unwrap().len(), 2);
        let w = Waveform::new(vec![0.1; 32000], 16000).unwrap();
        assert_eq!(frame_signal(&w, &cfg()).unwrap().len(), 198);
    }

    #[test]
    fn too_short_is_domain_error() {
        let w = Waveform::new(vec![0.1; 399], 16000).unwrap();
        assert!(matches!(frame_signal(&w, &cfg()), Err(Error::Domain(_))));
    }

    #[test]
    fn constant_input_after_pre_emphasis() {
        let c = 0.5;
        let w = Waveform::new(vec![c; 560], 16000).unwrap();
        let frames = frame_signal(&w, &cfg()).unwrap();
        let win = hamming(400);
        for (i, frame) in frames.iter().enumerate() {
            for (n, &v) in frame.iter().enumerate() {
                let expected = if i == 0 && n == 0 { c * win[0] } else { (c - 0.97 * c) * win[n] };
                assert!((v - expected).abs() < 1e-15, "frame {i} sample {n}");
            }
        }
    }

    #[test]
    fn hamming_endpoints() {
        let w = hamming(400);
        assert!((w[0] - 0.08).abs() < 1e-12);
        assert!((w[399] - 0.08).abs() < 1e-12);
        assert!(w.iter().all(|&v| v <= 1.0));
    }
}
