//! Audio containers, WAV I/O, corpus manifests and the synthetic corpus voice.

mod manifest;
mod synth;
mod wav;

pub use manifest::{load_manifest, write_manifest, Manifest, ManifestEntry};
pub use synth::{
    stable_hash, synth_babble_noise, synth_car_noise, synth_utterance, SynthSpeakerSpec,
};
pub use wav::{read_wav, write_wav, wav_bytes};

use crate::error::{Error, Result};

/// Mono signal with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::domain("sample rate must be positive"));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Numeric(format!("non-finite sample at index {i}")));
        }
        Ok(Self { samples, sample_rate })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0f64, |m, s| m.max(s.abs()))
    }

    pub fn mean_square(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s * s).sum::<f64>() / self.samples.len() as f64
    }

    /// Circularly rotates the samples left by `offset`.
    pub fn rotated(&self, offset: usize) -> Waveform {
        let mut samples = self.samples.clone();
        if !samples.is_empty() {
            let n = samples.len();
            samples.rotate_left(offset % n);
        }
        Waveform { samples, sample_rate: self.sample_rate }
    }

    pub(crate) fn require_same_rate(&self, other: &Waveform) -> Result<()> {
        if self.sample_rate != other.sample_rate {
            return Err(Error::domain(format!(
                "sample rate mismatch: {} Hz vs {} Hz",
                self.sample_rate, other.sample_rate
            )));
        }
        Ok(())
    }
}
