//! Parametric source-filter voice used to build desk-scale corpora.
//!
//! A phrase is a fixed sequence of vowel/fricative segments derived from the
//! phrase id alone. A speaker contributes f0 and formant offsets. The seed
//! drives session variability: small f0 drift, formant jitter, segment timing,
//! leading/trailing silence and the background noise floor.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::Waveform;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpeakerSpec {
    pub speaker_id: String,
    pub f0: f64,
    pub formant_offsets: [f64; 3],
    pub seed: u64,
}

/// FNV-1a, used wherever ids seed randomness.
pub fn stable_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

const VOWELS: [[f64; 3]; 10] = [
    [270.0, 2290.0, 3010.0],
    [390.0, 1990.0, 2550.0],
    [530.0, 1840.0, 2480.0],
    [660.0, 1720.0, 2410.0],
    [730.0, 1090.0, 2440.0],
    [570.0, 840.0, 2410.0],
    [440.0, 1020.0, 2240.0],
    [300.0, 870.0, 2240.0],
    [640.0, 1190.0, 2390.0],
    [490.0, 1350.0, 1690.0],
];
const BANDWIDTHS: [f64; 3] = [80.0, 110.0, 160.0];
const PEAK: f64 = 0.9;
const UPDATE_BLOCK: usize = 32;
const TRANSITION_S: f64 = 0.025;
const FRICATIVE_RMS: f64 = 0.5;

#[derive(Debug, Clone)]
struct Segment {
    formants: [f64; 3],
    level: f64,
    fricative: Option<f64>,
    weight: f64,
}

fn phrase_plan(phrase_id: &str) -> Vec<Segment> {
    let mut rng = ChaCha8Rng::seed_from_u64(stable_hash(phrase_id) ^ 0x5eed_0f_9a5e);
    let n = rng.random_range(6..=8);
    let mut last = usize::MAX;
    (0..n)
        .map(|_| {
            let mut v = rng.random_range(0..VOWELS.len());
            if v == last {
                v = (v + 1 + rng.random_range(0..VOWELS.len() - 1)) % VOWELS.len();
            }
            last = v;
            let fricative = rng.random_bool(0.2).then(|| rng.random_range(2500.0..5500.0));
            Segment {
                formants: VOWELS[v],
                level: rng.random_range(0.55..1.0),
                fricative,
                weight: rng.random_range(0.7..1.3),
            }
        })
        .collect()
}

fn resonance_gain(f: f64, formants: &[f64; 3]) -> f64 {
    formants.iter().zip(BANDWIDTHS).fold(1.0, |g, (&fc, bw)| {
        let fc2 = fc * fc;
        g * fc2 / ((fc2 - f * f).powi(2) + (bw * f).powi(2)).sqrt()
    })
}

struct Timeline {
    lead: f64,
    active: f64,
    bounds: Vec<f64>,
}

impl Timeline {
    /// Returns (segment index, neighbour index, blend toward neighbour).
    fn locate(&self, t: f64) -> Option<(usize, usize, f64)> {
        let u = (t - self.lead) / self.active;
        if !(0.0..1.0).contains(&u) {
            return None;
        }
        let i = self.bounds.iter().position(|&b| u < b).unwrap_or(self.bounds.len() - 1);
        let half = 0.5 * TRANSITION_S / self.active;
        let start = if i == 0 { 0.0 } else { self.bounds[i - 1] };
        let end = self.bounds[i];
        if i + 1 < self.bounds.len() && end - u < half {
            Some((i, i + 1, 0.5 * (1.0 - (end - u) / half)))
        } else if i > 0 && u - start < half {
            Some((i, i - 1, 0.5 * (1.0 - (u - start) / half)))
        } else {
            Some((i, i, 0.0))
        }
    }

    fn fade(&self, t: f64) -> f64 {
        let edge = 0.03;
        let from_start = t - self.lead;
        let to_end = self.lead + self.active - t;
        let d = from_start.min(to_end);
        if d <= 0.0 {
            0.0
        } else if d >= edge {
            1.0
        } else {
            0.5 - 0.5 * (PI * d / edge).cos()
        }
    }
}

/// Deterministic synthetic utterance; peak amplitude is scaled to 0.9.
pub fn synth_utterance(
    spec: &SynthSpeakerSpec,
    phrase_id: &str,
    duration: f64,
    sample_rate: u32,
) -> Result<Waveform> {
    if !(0.5..=10.0).contains(&duration) {
        return Err(Error::domain(format!("duration {duration} s outside [0.5, 10]")));
    }
    if !(80.0..=300.0).contains(&spec.f0) {
        return Err(Error::domain(format!("f0 {} Hz outside [80, 300]", spec.f0)));
    }
    let sr = sample_rate as f64;
    let n = (duration * sr).round() as usize;
    let plan = phrase_plan(phrase_id);
    let mut rng = ChaCha8Rng::seed_from_u64(
        spec.seed ^ stable_hash(phrase_id).rotate_left(17) ^ stable_hash(&spec.speaker_id),
    );

    let lead = rng.random_range(0.10..0.20f64).min(0.2 * duration);
    let trail = rng.random_range(0.10..0.20f64).min(0.2 * duration);
    let active = duration - lead - trail;
    let total_weight: f64 = plan.iter().map(|s| s.weight).sum();
    let mut acc = 0.0;
    let mut bounds: Vec<f64> = plan
        .iter()
        .map(|s| {
            acc += s.weight / total_weight;
            acc
        })
        .collect();
    let gap = 1.0 / plan.len() as f64;
    for i in 0..bounds.len() - 1 {
        let lo = if i == 0 { 0.0 } else { bounds[i - 1] } + 0.3 * gap;
        let jittered = bounds[i] + rng.random_range(-0.03..0.03);
        bounds[i] = jittered.max(lo).min(bounds[i + 1] - 0.3 * gap);
    }
    *bounds.last_mut().unwrap() = 1.0;
    let timeline = Timeline { lead, active, bounds };

    let drift = 1.0 + rng.random_range(-0.005..0.005);
    let vibrato_phase = rng.random_range(0.0..2.0 * PI);
    let formant_jitter: [f64; 3] = std::array::from_fn(|_| 1.0 + rng.random_range(-0.015..0.015));
    let noise_std = 5e-4 * rng.random_range(0.8..1.25);

    let max_harmonics = ((0.45 * sr) / (spec.f0 * 0.98)).floor() as usize;
    let mut amps = vec![0.0; max_harmonics];
    let mut theta = 0.0f64;
    let mut fric_state = [0.0f64; 2];
    let mut fric_center = 3500.0;
    let mut blend_formants = [0.0; 3];
    let mut level = 0.0;
    let mut fric_weight = 0.0;

    let mut speech = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / sr;
        let f0 = spec.f0 * drift * (1.0 + 0.01 * (2.0 * PI * 5.0 * t + vibrato_phase).sin());
        theta = (theta + 2.0 * PI * f0 / sr) % (2.0 * PI);

        if i % UPDATE_BLOCK == 0 {
            match timeline.locate(t) {
                Some((a, b, w)) => {
                    let (sa, sb) = (&plan[a], &plan[b]);
                    for k in 0..3 {
                        let target = (1.0 - w) * sa.formants[k] + w * sb.formants[k];
                        blend_formants[k] = (target + spec.formant_offsets[k]) * formant_jitter[k];
                    }
                    level = ((1.0 - w) * sa.level + w * sb.level) * timeline.fade(t);
                    let fa = sa.fricative.is_some() as u8 as f64;
                    let fb = sb.fricative.is_some() as u8 as f64;
                    fric_weight = (1.0 - w) * fa + w * fb;
                    if let Some(c) = sa.fricative.or(sb.fricative) {
                        fric_center = c.min(0.45 * sr);
                    }
                }
                None => {
                    level = 0.0;
                    fric_weight = 0.0;
                }
            }
            for (h, a) in amps.iter_mut().enumerate() {
                let f = (h + 1) as f64 * f0;
                *a = if f < 0.45 * sr {
                    resonance_gain(f, &blend_formants) / (h + 1) as f64
                } else {
                    0.0
                };
            }
            // unit voiced power per block; loudness comes from `level` only
            let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 0.0 {
                amps.iter_mut().for_each(|a| *a *= std::f64::consts::SQRT_2 / norm);
            }
        }

        // sin(h*theta) by the Chebyshev recurrence
        let two_cos = 2.0 * theta.cos();
        let (mut prev, mut cur) = (0.0, theta.sin());
        let mut voiced = 0.0;
        for &a in &amps {
            voiced += a * cur;
            let next = two_cos * cur - prev;
            prev = cur;
            cur = next;
        }

        let r = (-PI * 1500.0 / sr).exp();
        let a1 = 2.0 * r * (2.0 * PI * fric_center / sr).cos();
        let excitation: f64 = rng.sample(StandardNormal);
        let fric = excitation + a1 * fric_state[0] - r * r * fric_state[1];
        fric_state = [fric, fric_state[0]];
        // stationary output variance of the two-pole resonator for unit white input
        let r2 = r * r;
        let gain = ((1.0 + r2) / ((1.0 - r2) * ((1.0 + r2).powi(2) - a1 * a1))).sqrt();

        speech.push(level * ((1.0 - fric_weight) * voiced + fric_weight * FRICATIVE_RMS * fric / gain));
    }

    let peak = speech.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let scale = if peak > 0.0 { 0.85 / peak } else { 0.0 };
    for s in speech.iter_mut() {
        let floor: f64 = rng.sample(StandardNormal);
        *s = *s * scale + noise_std * floor;
    }
    normalize_peak(&mut speech, PEAK);
    Waveform::new(speech, sample_rate)
}

fn normalize_peak(samples: &mut [f64], target: f64) {
    let peak = samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if peak > 0.0 {
        let g = target / peak;
        samples.iter_mut().for_each(|s| *s *= g);
    }
}

/// Babble: several synthetic talkers overlapped, looped to `duration`.
pub fn synth_babble_noise(duration: f64, sample_rate: u32, seed: u64) -> Result<Waveform> {
    let n = (duration * sample_rate as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mix = vec![0.0; n];
    for talker in 0..6 {
        let spec = SynthSpeakerSpec {
            speaker_id: format!("babble-{talker}"),
            f0: rng.random_range(90.0..250.0),
            formant_offsets: [
                rng.random_range(-60.0..60.0),
                rng.random_range(-150.0..150.0),
                rng.random_range(-250.0..250.0),
            ],
            seed: rng.random(),
        };
        let mut filled = 0;
        let mut part = 0;
        while filled < n {
            let phrase = format!("babble-{seed}-{talker}-{part}");
            let utt = synth_utterance(&spec, &phrase, 3.0, sample_rate)?;
            let offset = if part == 0 { rng.random_range(0..utt.len()) } else { 0 };
            for &s in &utt.samples[offset..] {
                if filled == n {
                    break;
                }
                mix[filled] += s;
                filled += 1;
            }
            part += 1;
        }
    }
    for s in mix.iter_mut() {
        let w: f64 = rng.sample(StandardNormal);
        *s += 0.02 * w;
    }
    normalize_peak(&mut mix, PEAK);
    Waveform::new(mix, sample_rate)
}

/// Low-frequency rumble with engine harmonics.
pub fn synth_car_noise(duration: f64, sample_rate: u32, seed: u64) -> Result<Waveform> {
    let sr = sample_rate as f64;
    let n = (duration * sr).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let engine = rng.random_range(25.0..40.0);
    let (mut brown, mut lp) = (0.0f64, 0.0f64);
    let mut phase = 0.0f64;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / sr;
        let w: f64 = rng.sample(StandardNormal);
        brown = 0.995 * brown + w;
        lp = 0.9 * lp + 0.1 * brown;
        let f = engine * (1.0 + 0.02 * (2.0 * PI * 0.3 * t).sin());
        phase = (phase + 2.0 * PI * f / sr) % (2.0 * PI);
        let hum = (phase).sin() + 0.5 * (2.0 * phase).sin() + 0.25 * (3.0 * phase).sin();
        out.push(lp + 2.0 * hum + 0.05 * w);
    }
    normalize_peak(&mut out, PEAK);
    Waveform::new(out, sample_rate)
}
