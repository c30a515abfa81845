use crate::audio::Waveform;
use crate::error::{Error, Result};

/// `0.5 (wave + partner)` with the partner looped or cut to length; rescaled to
/// peak 0.99 only if the mix exceeds 1.
pub fn sound_mix(wave: &Waveform, partner: &Waveform) -> Result<Waveform> {
    if partner.is_empty() {
        return Err(Error::domain("sound-mix partner is empty"));
    }
    wave.require_same_rate(partner)?;
    let mut y: Vec<f64> = wave
        .samples
        .iter()
        .enumerate()
        .map(|(i, &s)| 0.5 * (s + partner.samples[i % partner.len()]))
        .collect();
    let peak = y.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if peak > 1.0 {
        let g = 0.99 / peak;
        y.iter_mut().for_each(|s| *s *= g);
    }
    Waveform::new(y, wave.sample_rate)
}
