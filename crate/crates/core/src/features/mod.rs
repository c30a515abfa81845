//! Acoustic front-end: framing, MFCC (C1..C19), RASTA, deltas, energy VAD and
//! utterance-level CMVN.

mod cmvn;
mod delta;
mod fmx;
mod frame;
mod mfcc;
mod rasta;
mod vad;

pub use cmvn::cmvn;
pub use delta::{append_deltas, delta};
pub use fmx::{read_fmx, write_fmx};
pub use frame::{frame_signal, hamming, pre_emphasis, Frames};
pub use mfcc::{hz_to_mel, mel_to_hz, mfcc_static, MelFilterbank, MfccAnalyzer};
pub use rasta::rasta_filter;
pub use vad::energy_vad;

use serde::{Deserialize, Serialize};

use crate::audio::Waveform;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrontendConfig {
    /// Analysis window, seconds.
    pub frame_len: f64,
    /// Frame shift, seconds.
    pub frame_hop: f64,
    pub n_mel_filters: usize,
    /// Static cepstra kept, starting at C1.
    pub n_static_ceps: usize,
    pub pre_emphasis: f64,
    /// Frames more than this many dB below the loudest frame are dropped.
    pub vad_threshold_db: f64,
    pub delta_window: usize,
    /// Lower edge of the mel filterbank, Hz. The upper edge is Nyquist.
    pub low_freq: f64,
}

impl Default for FrontendConfig {
    fn default() -> Self {
        Self {
            frame_len: 0.025,
            frame_hop: 0.010,
            n_mel_filters: 27,
            n_static_ceps: 19,
            pre_emphasis: 0.97,
            vad_threshold_db: 30.0,
            delta_window: 2,
            low_freq: 64.0,
        }
    }
}

impl FrontendConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.frame_hop > 0.0 && self.frame_hop <= self.frame_len) {
            return Err(Error::Config(format!(
                "frame_hop {} must lie in (0, frame_len = {}]",
                self.frame_hop, self.frame_len
            )));
        }
        if self.n_static_ceps == 0 || self.n_static_ceps >= self.n_mel_filters {
            return Err(Error::Config(format!(
                "n_static_ceps {} must lie in [1, n_mel_filters = {})",
                self.n_static_ceps, self.n_mel_filters
            )));
        }
        if self.delta_window == 0 {
            return Err(Error::Config("delta_window must be at least 1".into()));
        }
        if !(self.vad_threshold_db >= 0.0) {
            return Err(Error::Config("vad_threshold_db must be non-negative".into()));
        }
        Ok(())
    }

    pub fn frame_len_samples(&self, sample_rate: u32) -> usize {
        (self.frame_len * sample_rate as f64).round() as usize
    }

    pub fn hop_samples(&self, sample_rate: u32) -> usize {
        (self.frame_hop * sample_rate as f64).round() as usize
    }

    /// Output row width: statics plus their first and second deltas.
    pub fn feature_dim(&self) -> usize {
        3 * self.n_static_ceps
    }
}

/// Row-major per-frame feature vectors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureMatrix {
    n_dims: usize,
    data: Vec<f64>,
    /// Frame centre times, seconds. Empty when loaded from a cache file.
    pub frame_times: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(n_dims: usize, data: Vec<f64>, frame_times: Vec<f64>) -> Result<Self> {
        if n_dims == 0 {
            return Err(Error::domain("feature dimension must be positive"));
        }
        if data.len() % n_dims != 0 {
            return Err(Error::domain(format!(
                "{} values do not divide into rows of {n_dims}",
                data.len()
            )));
        }
        if !frame_times.is_empty() && frame_times.len() != data.len() / n_dims {
            return Err(Error::domain("frame_times length differs from row count"));
        }
        Ok(Self { n_dims, data, frame_times })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_dims = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_dims) {
            return Err(Error::domain("ragged rows"));
        }
        Self::new(n_dims, rows.concat(), Vec::new())
    }

    pub fn n_rows(&self) -> usize {
        if self.n_dims == 0 {
            0
        } else {
            self.data.len() / self.n_dims
        }
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_dims..(i + 1) * self.n_dims]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.n_dims.max(1))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, row: usize, dim: usize) -> f64 {
        self.data[row * self.n_dims + dim]
    }

    pub fn select(&self, mask: &[bool]) -> FeatureMatrix {
        let mut data = Vec::new();
        let mut times = Vec::new();
        for (i, row) in self.rows().enumerate() {
            if mask.get(i).copied().unwrap_or(false) {
                data.extend_from_slice(row);
                if let Some(&t) = self.frame_times.get(i) {
                    times.push(t);
                }
            }
        }
        FeatureMatrix { n_dims: self.n_dims, data, frame_times: times }
    }

    /// Stacks matrices of equal width, in order.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a FeatureMatrix>) -> Result<FeatureMatrix> {
        let mut n_dims = 0;
        let mut data = Vec::new();
        for p in parts {
            if n_dims == 0 {
                n_dims = p.n_dims;
            } else if p.n_dims != n_dims {
                return Err(Error::domain(format!(
                    "cannot stack {}-dim rows onto {n_dims}-dim rows",
                    p.n_dims
                )));
            }
            data.extend_from_slice(&p.data);
        }
        if n_dims == 0 {
            return Err(Error::domain("nothing to stack"));
        }
        Ok(FeatureMatrix { n_dims, data, frame_times: Vec::new() })
    }
}

/// Full front-end: frames, statics, RASTA, deltas, VAD row selection, CMVN.
pub fn extract_features(wave: &Waveform, cfg: &FrontendConfig) -> Result<FeatureMatrix> {
    cfg.validate()?;
    let frames = frame_signal(wave, cfg)?;
    let statics = mfcc_static(&frames, cfg, wave.sample_rate)?;
    let filtered = rasta_filter(&statics);
    let dynamic = append_deltas(&filtered, cfg.delta_window);
    let mask = energy_vad(&frames, cfg);
    let voiced = dynamic.select(&mask);
    if voiced.n_rows() < 2 {
        return Err(Error::domain(format!(
            "only {} voiced frame(s); need at least 2",
            voiced.n_rows()
        )));
    }
    cmvn(&voiced)
}
