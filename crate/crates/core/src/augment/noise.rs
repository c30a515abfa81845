use crate::audio::Waveform;
use crate::error::{Error, Result};
use crate::features::{energy_vad, frame_signal, FrontendConfig};

/// Frame-level speech mask plus the geometry to map it onto samples.
#[derive(Debug, Clone, PartialEq)]
pub struct VadMask {
    pub selected: Vec<bool>,
    pub frame_len: usize,
    pub hop: usize,
}

impl VadMask {
    /// Runs the front-end energy VAD on `wave`.
    pub fn from_waveform(wave: &Waveform, cfg: &FrontendConfig) -> Result<Self> {
        let frames = frame_signal(wave, cfg)?;
        Ok(Self { selected: energy_vad(&frames, cfg), frame_len: frames.frame_len, hop: frames.hop })
    }

    /// Every sample selected.
    pub fn all(len: usize) -> Self {
        Self { selected: vec![true], frame_len: len, hop: len.max(1) }
    }

    /// Per-sample gate: a sample is active if any selected frame covers it.
    pub fn sample_gate(&self, len: usize) -> Vec<bool> {
        let mut gate = vec![false; len];
        for (i, _) in self.selected.iter().enumerate().filter(|(_, &s)| s) {
            let start = (i * self.hop).min(len);
            let end = (start + self.frame_len).min(len);
            gate[start..end].iter_mut().for_each(|g| *g = true);
        }
        gate
    }
}

/// Mean square over gated samples.
pub fn gated_power(samples: &[f64], gate: &[bool]) -> f64 {
    let (sum, count) = samples
        .iter()
        .zip(gate)
        .filter(|(_, &g)| g)
        .fold((0.0, 0usize), |(s, c), (x, _)| (s + x * x, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

fn looped(noise: &Waveform, len: usize) -> Vec<f64> {
    (0..len).map(|i| noise.samples[i % noise.len()]).collect()
}

/// Gain applied to the looped noise so that gated speech/noise power equals `snr_db`.
pub fn noise_gain(wave: &Waveform, noise: &Waveform, snr_db: f64, vad: &VadMask) -> Result<f64> {
    if noise.is_empty() {
        return Err(Error::domain("noise signal is empty"));
    }
    wave.require_same_rate(noise)?;
    let gate = vad.sample_gate(wave.len());
    if !gate.iter().any(|&g| g) {
        return Err(Error::domain("VAD mask selects no samples"));
    }
    let speech = gated_power(&wave.samples, &gate);
    let noise_power = gated_power(&looped(noise, wave.len()), &gate);
    if noise_power <= 0.0 {
        return Err(Error::domain("noise has zero power over the speech region"));
    }
    Ok((speech / (noise_power * 10f64.powf(snr_db / 10.0))).sqrt())
}

/// Adds looped noise at `snr_db` relative to VAD-gated speech power. No clipping.
pub fn add_noise_snr(wave: &Waveform, noise: &Waveform, snr_db: f64, vad: &VadMask) -> Result<Waveform> {
    let g = noise_gain(wave, noise, snr_db, vad)?;
    let n = looped(noise, wave.len());
    let samples = wave.samples.iter().zip(n).map(|(s, v)| s + g * v).collect();
    Waveform::new(samples, wave.sample_rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_powers_at_zero_db_give_unit_gain() {
        let speech = Waveform { samples: [1.0, -1.0].repeat(500), sample_rate: 8000 };
        let noise = Waveform { samples: [-1.0, 1.0, 1.0, -1.0].repeat(100), sample_rate: 8000 };
        let g = noise_gain(&speech, &noise, 0.0, &VadMask::all(speech.len())).unwrap();
        assert!((g - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_noise_rejected() {
        let speech = Waveform { samples: vec![0.5; 100], sample_rate: 8000 };
        let noise = Waveform { samples: vec![0.0; 10], sample_rate: 8000 };
        assert!(matches!(
            add_noise_snr(&speech, &noise, 5.0, &VadMask::all(100)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn gate_covers_selected_frames() {
        let m = VadMask { selected: vec![false, true, false], frame_len: 4, hop: 2 };
        assert_eq!(m.sample_gate(8), [false, false, true, true, true, true, false, false]);
    }
}
