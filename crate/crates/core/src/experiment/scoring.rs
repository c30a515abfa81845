use std::collections::BTreeMap;
use std::fmt;

use super::cache::{file_key, FeatureCache};
use super::enroll::SpeakerModelSet;
use crate::audio::{read_wav, stable_hash, Manifest, Waveform};
use crate::augment::{add_noise_snr, VadMask};
use crate::error::{Error, Result};
use crate::eval::{ScoreSet, TrialList};
use crate::gmm::{frame_log_likelihoods, llr_from_frame_lls, DiagGmm};

/// Test-side condition. Noise never touches enrollment data.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    Clean,
    Noisy { noise: String, snr_db: f64, clip: Waveform },
}

impl Condition {
    pub fn label(&self) -> String {
        match self {
            Condition::Clean => "clean".into(),
            Condition::Noisy { noise, snr_db, .. } => format!("{noise}-{snr_db}dB"),
        }
    }

    /// Applies the condition to one clean test utterance.
    pub fn apply(&self, utterance_id: &str, wave: Waveform, cache: &FeatureCache) -> Result<Waveform> {
        match self {
            Condition::Clean => Ok(wave),
            Condition::Noisy { snr_db, clip, .. } => {
                // speech level from the clean signal, noise segment varies per utterance
                let vad = VadMask::from_waveform(&wave, cache.frontend())?;
                let offset = (stable_hash(utterance_id) % clip.len().max(1) as u64) as usize;
                add_noise_snr(&wave, &clip.rotated(offset), *snr_db, &vad)
            }
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Scores every trial for each requested system under one condition.
/// Test features and UBM frame likelihoods are computed once per utterance.
pub fn score_trials(
    models: &SpeakerModelSet,
    ubm: &DiagGmm,
    trials: &TrialList,
    test: &Manifest,
    systems: &[String],
    condition: &Condition,
    cache: &FeatureCache,
) -> Result<BTreeMap<String, ScoreSet>> {
    let mut missing = Vec::new();
    let mut by_utt: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for t in &trials.trials {
        if test.get(&t.utterance_id).is_none() {
            missing.push(format!("utterance {}", t.utterance_id));
        }
        for s in systems {
            if models.get(&t.model_id, s).is_none() {
                missing.push(format!("model {}/{s}", t.model_id));
            }
        }
        by_utt.entry(&t.utterance_id).or_default().push(&t.model_id);
    }
    if !missing.is_empty() {
        missing.sort();
        missing.dedup();
        return Err(Error::Incomplete { missing });
    }

    let mut out: BTreeMap<String, ScoreSet> = systems.iter().map(|s| (s.clone(), ScoreSet::new(s.clone()))).collect();
    for (utt, model_ids) in by_utt {
        let entry = test.get(utt).expect("checked above");
        let ctx = |e: Error| e.context(format!("test utterance {utt} ({condition})"));
        let key = format!("{}|{}", file_key(&entry.path).map_err(ctx)?, condition_key(condition));
        let feats = cache
            .features(&key, || condition.apply(utt, read_wav(&entry.path)?, cache))
            .map_err(ctx)?;
        let ubm_lls = frame_log_likelihoods(ubm, &feats).map_err(ctx)?;
        for model in model_ids {
            for s in systems {
                let gmm = models.get(model, s).expect("checked above");
                let score = llr_from_frame_lls(gmm, &ubm_lls, &feats).map_err(ctx)?;
                out.get_mut(s).unwrap().insert(model, utt, score)?;
            }
        }
    }
    Ok(out)
}

fn condition_key(c: &Condition) -> String {
    match c {
        Condition::Clean => "clean".into(),
        Condition::Noisy { noise, snr_db, clip } => {
            let h = clip.samples.iter().fold(0u64, |h, s| (h ^ s.to_bits()).wrapping_mul(0x0100_0000_01b3));
            format!("{noise}|{:016x}|{h:016x}", snr_db.to_bits())
        }
    }
}
