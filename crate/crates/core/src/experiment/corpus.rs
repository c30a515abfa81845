//! Deterministic synthetic corpus laid out like a text-dependent evaluation:
//! disjoint background and target speakers, per-phrase enrollment sessions,
//! test sessions, a full model-by-test trial list, noise clips and a hall IR.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::SynthConfig;
use super::enroll::model_id;
use crate::audio::{
    stable_hash, synth_babble_noise, synth_car_noise, synth_utterance, write_manifest, write_wav, Manifest,
    ManifestEntry, SynthSpeakerSpec,
};
use crate::augment::synth_hall_ir;
use crate::error::{Error, Result};
use crate::eval::{Trial, TrialList, TrialType};

const NOISE_SECONDS: f64 = 12.0;
const EXTRA_UBM_PHRASES: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSummary {
    pub root: PathBuf,
    pub ubm: PathBuf,
    pub enroll: PathBuf,
    pub test: PathBuf,
    pub trials: PathBuf,
    pub noise: PathBuf,
    pub ir: PathBuf,
    pub n_ubm: usize,
    pub n_enroll: usize,
    pub n_test: usize,
    /// Trial counts in [`TrialType::ALL`] order.
    pub trial_counts: [usize; 4],
}

pub fn phrase_id(i: usize) -> String {
    format!("phrase{i:02}")
}

/// Speaker voice drawn from the corpus seed and speaker id.
pub fn speaker_spec(speaker_id: &str, seed: u64) -> SynthSpeakerSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stable_hash(speaker_id));
    SynthSpeakerSpec {
        speaker_id: speaker_id.to_string(),
        f0: rng.random_range(90.0..260.0),
        formant_offsets: [
            rng.random_range(-80.0..80.0),
            rng.random_range(-220.0..220.0),
            rng.random_range(-300.0..300.0),
        ],
        seed: 0,
    }
}

fn utterance(
    root: &Path,
    voice: &SynthSpeakerSpec,
    phrase: &str,
    utt_id: &str,
    cfg: &SynthConfig,
) -> Result<ManifestEntry> {
    let session_seed = cfg.seed ^ stable_hash(utt_id).rotate_left(29);
    let spec = SynthSpeakerSpec { seed: session_seed, ..voice.clone() };
    let duration = 1.8 + 0.8 * ((stable_hash(utt_id) >> 11) as f64 / (1u64 << 53) as f64);
    let wave = synth_utterance(&spec, phrase, duration, cfg.sample_rate)?;
    let path = root.join("wav").join(format!("{utt_id}.wav"));
    write_wav(&wave, &path)?;
    Ok(ManifestEntry {
        utterance_id: utt_id.to_string(),
        speaker_id: voice.speaker_id.clone(),
        phrase_id: phrase.to_string(),
        path,
    })
}

/// Every model crossed with every test utterance.
pub fn build_trials(enroll: &Manifest, test: &Manifest) -> Result<TrialList> {
    let mut models: Vec<(String, &str, &str)> = Vec::new();
    for e in &enroll.entries {
        let id = model_id(&e.speaker_id, &e.phrase_id);
        if !models.iter().any(|(m, _, _)| *m == id) {
            models.push((id, &e.speaker_id, &e.phrase_id));
        }
    }
    let mut trials = Vec::with_capacity(models.len() * test.len());
    for (id, spk, phrase) in &models {
        for t in &test.entries {
            let kind = TrialType::classify(t.speaker_id == *spk, t.phrase_id == *phrase);
            trials.push(Trial { model_id: id.clone(), utterance_id: t.utterance_id.clone(), kind });
        }
    }
    TrialList::new(trials)
}

pub fn gen_synth_corpus(cfg: &SynthConfig) -> Result<CorpusSummary> {
    if cfg.n_targets == 0 || cfg.n_phrases == 0 || cfg.sessions == 0 || cfg.test_sessions == 0 || cfg.n_ubm_speakers == 0 {
        return Err(Error::domain("corpus counts must be positive"));
    }
    let root = cfg.out_dir.clone();
    let io = |p: &Path, e| Error::io(p, e);
    fs::create_dir_all(root.join("wav")).map_err(|e| io(&root, e))?;
    fs::create_dir_all(root.join("fixtures")).map_err(|e| io(&root, e))?;

    let phrases: Vec<String> = (0..cfg.n_phrases).map(phrase_id).collect();
    let mut ubm_phrases = phrases.clone();
    ubm_phrases.extend((0..EXTRA_UBM_PHRASES).map(|i| format!("bg{i:02}")));

    let mut ubm = Manifest::default();
    for s in 0..cfg.n_ubm_speakers {
        let voice = speaker_spec(&format!("bg{s:03}"), cfg.seed);
        for phrase in &ubm_phrases {
            for k in 0..cfg.ubm_sessions {
                let id = format!("{}_{phrase}_u{k}", voice.speaker_id);
                ubm.entries.push(utterance(&root, &voice, phrase, &id, cfg)?);
            }
        }
    }

    let mut enroll = Manifest::default();
    let mut test = Manifest::default();
    for s in 0..cfg.n_targets {
        let voice = speaker_spec(&format!("spk{s:03}"), cfg.seed);
        for phrase in &phrases {
            for k in 0..cfg.sessions {
                let id = format!("{}_{phrase}_e{k}", voice.speaker_id);
                enroll.entries.push(utterance(&root, &voice, phrase, &id, cfg)?);
            }
            for k in 0..cfg.test_sessions {
                let id = format!("{}_{phrase}_t{k}", voice.speaker_id);
                test.entries.push(utterance(&root, &voice, phrase, &id, cfg)?);
            }
        }
    }
    let trials = build_trials(&enroll, &test)?;

    let ir = root.join("fixtures").join("hall_ir.wav");
    write_wav(&synth_hall_ir(cfg.sample_rate, cfg.seed ^ 0x1a11), &ir)?;
    let mut noise = Manifest::default();
    for (name, wave) in [
        ("market", synth_babble_noise(NOISE_SECONDS, cfg.sample_rate, cfg.seed ^ 0xbabb1e)?),
        ("car", synth_car_noise(NOISE_SECONDS, cfg.sample_rate, cfg.seed ^ 0xca7)?),
    ] {
        let path = root.join("fixtures").join(format!("{name}.wav"));
        write_wav(&wave, &path)?;
        noise.entries.push(ManifestEntry {
            utterance_id: name.into(),
            speaker_id: "noise".into(),
            phrase_id: "-".into(),
            path,
        });
    }

    let summary = CorpusSummary {
        ubm: root.join("ubm.tsv"),
        enroll: root.join("enroll.tsv"),
        test: root.join("test.tsv"),
        trials: root.join("trials.tsv"),
        noise: root.join("noise.tsv"),
        ir,
        n_ubm: ubm.len(),
        n_enroll: enroll.len(),
        n_test: test.len(),
        trial_counts: TrialType::ALL.map(|t| trials.count(t)),
        root: root.clone(),
    };
    write_manifest(&ubm, &summary.ubm, &root)?;
    write_manifest(&enroll, &summary.enroll, &root)?;
    write_manifest(&test, &summary.test, &root)?;
    write_manifest(&noise, &summary.noise, &root)?;
    fs::write(&summary.trials, trials.to_tsv()).map_err(|e| io(&summary.trials, e))?;
    Ok(summary)
}
