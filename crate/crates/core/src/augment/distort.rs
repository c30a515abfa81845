use std::f64::consts::FRAC_PI_2;

use crate::audio::Waveform;

/// Applies `y <- sin(pi/2 * y)` `depth` times per sample.
pub fn harmonic_distort(wave: &Waveform, depth: u32) -> Waveform {
    let samples = wave
        .samples
        .iter()
        .map(|&s| (0..depth).fold(s, |y, _| (FRAC_PI_2 * y).sin()))
        .collect();
    Waveform { samples, sample_rate: wave.sample_rate }
}
