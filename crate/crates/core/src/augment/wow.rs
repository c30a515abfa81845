use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::audio::Waveform;
use crate::error::{Error, Result};

/// Periodic time warp `phi(x) = x + a sin(2 pi f x) / (2 pi f)`, x in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WowParams {
    pub a: f64,
    pub f: f64,
}

impl Default for WowParams {
    fn default() -> Self {
        Self { a: Self::default_intensity(), f: Self::default_frequency() }
    }
}

impl WowParams {
    pub(crate) fn default_intensity() -> f64 {
        3.0
    }

    pub(crate) fn default_frequency() -> f64 {
        2.0
    }

    pub fn validate(&self, duration: f64) -> Result<()> {
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(Error::domain(format!("wow intensity {} must be >= 0", self.a)));
        }
        if !(self.f > 0.0 && self.f.is_finite()) {
            return Err(Error::domain(format!("wow frequency {} must be > 0", self.f)));
        }
        let excursion = self.a / (2.0 * PI * self.f);
        if excursion >= duration {
            return Err(Error::domain(format!(
                "wow excursion {excursion:.3} s not shorter than the {duration:.3} s signal"
            )));
        }
        Ok(())
    }

    /// Source position, in samples, read for output sample `n`.
    pub fn source_position(&self, n: usize, sample_rate: u32) -> f64 {
        let sr = sample_rate as f64;
        let x = n as f64 / sr;
        let w = 2.0 * PI * self.f;
        n as f64 + self.a * sr * (w * x).sin() / w
    }
}

/// Output sample `n` takes the input at `phi(n / sr)`, linearly interpolated and
/// clamped to the signal.
pub fn wow_resample(wave: &Waveform, params: WowParams) -> Result<Waveform> {
    params.validate(wave.duration())?;
    let x = &wave.samples;
    let last = x.len().saturating_sub(1);
    let samples = (0..x.len())
        .map(|n| {
            let pos = params.source_position(n, wave.sample_rate).clamp(0.0, last as f64);
            let i0 = pos.floor() as usize;
            let frac = pos - i0 as f64;
            if i0 >= last {
                x[last]
            } else {
                x[i0] + frac * (x[i0 + 1] - x[i0])
            }
        })
        .collect();
    Waveform::new(samples, wave.sample_rate)
}
