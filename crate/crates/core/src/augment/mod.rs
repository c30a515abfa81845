//! Enrollment-data augmentation transforms and SNR-calibrated noise mixing.

mod distort;
mod ir;
mod mix;
mod noise;
mod pitch;
mod wow;

pub use distort::harmonic_distort;
pub use ir::{apply_ir, convolve_truncated, synth_hall_ir};
pub use mix::sound_mix;
pub use noise::{add_noise_snr, gated_power, noise_gain, VadMask};
pub use pitch::{pitch_shift, time_stretch};
pub use wow::{wow_resample, WowParams};

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

/// One augmentation system's transform and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AugmentKind {
    /// Each listed shift yields its own copy of the utterance.
    PitchShift { semitones: Vec<i32> },
    Wow {
        #[serde(default = "WowParams::default_intensity")]
        a: f64,
        #[serde(default = "WowParams::default_frequency")]
        f: f64,
    },
    HarmonicDistortion {
        #[serde(default = "default_depth")]
        depth: u32,
    },
    ImpulseResponse { ir_path: PathBuf },
    /// Partner utterances come from the same enrollment group.
    SoundMix,
}

fn default_depth() -> u32 {
    5
}

impl AugmentKind {
    pub fn name(&self) -> &'static str {
        match self {
            AugmentKind::PitchShift { .. } => "pitch_shift",
            AugmentKind::Wow { .. } => "wow",
            AugmentKind::HarmonicDistortion { .. } => "harmonic_distortion",
            AugmentKind::ImpulseResponse { .. } => "impulse_response",
            AugmentKind::SoundMix => "sound_mix",
        }
    }
}

/// A named augmentation system (system ids `b`..`f` in the default layout).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentSpec {
    pub system: String,
    #[serde(flatten)]
    pub kind: AugmentKind,
}
