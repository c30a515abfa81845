use std::collections::BTreeMap;
use std::path::Path;

use super::cache::{file_key, FeatureCache};
use super::config::{multi_condition_id, ORIGINAL_SYSTEM};
use crate::audio::{read_wav, Manifest, ManifestEntry, Waveform};
use crate::augment::{apply_ir, harmonic_distort, pitch_shift, sound_mix, wow_resample, AugmentKind, AugmentSpec, WowParams};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::gmm::{map_adapt, save_gmm, DiagGmm, MapConfig};

/// Models are per (speaker, pass-phrase).
pub fn model_id(speaker_id: &str, phrase_id: &str) -> String {
    format!("{speaker_id}_{phrase_id}")
}

/// One speaker's enrollment sessions of one phrase.
#[derive(Debug, Clone, PartialEq)]
pub struct EnrollmentGroup {
    pub model_id: String,
    pub speaker_id: String,
    pub phrase_id: String,
    pub sessions: Vec<ManifestEntry>,
}

/// Groups in order of first appearance in the manifest.
pub fn enrollment_groups(manifest: &Manifest) -> Vec<EnrollmentGroup> {
    let mut groups: Vec<EnrollmentGroup> = Vec::new();
    for e in &manifest.entries {
        let id = model_id(&e.speaker_id, &e.phrase_id);
        match groups.iter_mut().find(|g| g.model_id == id) {
            Some(g) => g.sessions.push(e.clone()),
            None => groups.push(EnrollmentGroup {
                model_id: id,
                speaker_id: e.speaker_id.clone(),
                phrase_id: e.phrase_id.clone(),
                sessions: vec![e.clone()],
            }),
        }
    }
    groups
}

/// Per-system transform plus any audio it needs.
#[derive(Debug, Clone)]
pub struct Augmenter {
    pub spec: AugmentSpec,
    ir: Option<Waveform>,
}

impl Augmenter {
    pub fn new(spec: &AugmentSpec) -> Result<Self> {
        let ir = match &spec.kind {
            AugmentKind::ImpulseResponse { ir_path } => {
                Some(read_wav(ir_path).map_err(|e| e.context(format!("system {} impulse response", spec.system)))?)
            }
            _ => None,
        };
        Ok(Self { spec: spec.clone(), ir })
    }

    /// Transformed copies of one utterance; `partner` is used by sound mix.
    pub fn apply(&self, wave: &Waveform, partner: &Waveform) -> Result<Vec<Waveform>> {
        Ok(match &self.spec.kind {
            AugmentKind::PitchShift { semitones } => {
                semitones.iter().map(|&s| pitch_shift(wave, s)).collect::<Result<_>>()?
            }
            AugmentKind::Wow { a, f } => vec![wow_resample(wave, WowParams { a: *a, f: *f })?],
            AugmentKind::HarmonicDistortion { depth } => vec![harmonic_distort(wave, *depth)],
            AugmentKind::ImpulseResponse { .. } => vec![apply_ir(wave, self.ir.as_ref().expect("loaded in new"))?],
            AugmentKind::SoundMix => vec![sound_mix(wave, partner)?],
        })
    }

    fn describe(&self) -> String {
        format!("{:?}", self.spec.kind)
    }
}

/// Trained models: model id -> system id -> GMM, with the frame counts each
/// was adapted on.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpeakerModelSet {
    pub models: BTreeMap<String, BTreeMap<String, DiagGmm>>,
    pub frame_counts: BTreeMap<(String, String), usize>,
}

impl SpeakerModelSet {
    pub fn get(&self, model_id: &str, system: &str) -> Option<&DiagGmm> {
        self.models.get(model_id)?.get(system)
    }

    pub fn systems(&self) -> Vec<String> {
        let mut out: Vec<String> = self.models.values().flat_map(|m| m.keys().cloned()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn len(&self) -> usize {
        self.models.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn insert(&mut self, model: &str, system: &str, gmm: DiagGmm, frames: usize) {
        self.models.entry(model.into()).or_default().insert(system.into(), gmm);
        self.frame_counts.insert((model.into(), system.into()), frames);
    }

    /// Writes `dir/<system>/<model>.json`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        for (model, systems) in &self.models {
            for (system, gmm) in systems {
                let sub = dir.join(system);
                std::fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
                save_gmm(gmm, sub.join(format!("{model}.json")))?;
            }
        }
        Ok(())
    }

    /// Reads models written by [`SpeakerModelSet::save`] for the given systems.
    pub fn load(dir: &Path, systems: &[String]) -> Result<Self> {
        let mut set = Self::default();
        for system in systems {
            let sub = dir.join(system);
            let mut files: Vec<_> = std::fs::read_dir(&sub)
                .map_err(|e| Error::io(&sub, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            for f in files {
                let model = f.file_stem().unwrap().to_string_lossy().into_owned();
                let gmm = crate::gmm::load_gmm(&f)?;
                set.models.entry(model).or_default().insert(system.clone(), gmm);
            }
        }
        Ok(set)
    }
}

/// MAP-enrolls every group for the original data, each augmentation system
/// and, when given, the pooled multi-condition subset.
pub fn enroll_all(
    ubm: &DiagGmm,
    enrollment: &Manifest,
    augmenters: &[Augmenter],
    map: &MapConfig,
    multi_condition: Option<&[String]>,
    cache: &FeatureCache,
) -> Result<SpeakerModelSet> {
    let groups = enrollment_groups(enrollment);
    if groups.is_empty() {
        return Err(Error::domain("enrollment manifest is empty"));
    }
    let mut set = SpeakerModelSet::default();
    for group in &groups {
        let per_system = group_features(group, augmenters, cache)?;
        for (system, feats) in &per_system {
            let gmm = map_adapt(ubm, feats, map).map_err(|e| e.context(format!("enrolling {} system {system}", group.model_id)))?;
            set.insert(&group.model_id, system, gmm, feats.n_rows());
        }
        if let Some(subset) = multi_condition {
            let parts: Vec<&FeatureMatrix> = subset
                .iter()
                .map(|s| per_system.get(s).ok_or_else(|| Error::Config(format!("multi-condition system '{s}' is not enrolled"))))
                .collect::<Result<_>>()?;
            let pooled = FeatureMatrix::concat(parts)?;
            let id = multi_condition_id(subset);
            let gmm = map_adapt(ubm, &pooled, map).map_err(|e| e.context(format!("enrolling {} system {id}", group.model_id)))?;
            set.insert(&group.model_id, &id, gmm, pooled.n_rows());
        }
        log::debug!("enrolled {}", group.model_id);
    }
    Ok(set)
}

/// Pooled enrollment features of one group for every base system.
pub fn group_features(
    group: &EnrollmentGroup,
    augmenters: &[Augmenter],
    cache: &FeatureCache,
) -> Result<BTreeMap<String, FeatureMatrix>> {
    let mut waves = Vec::with_capacity(group.sessions.len());
    let mut keys = Vec::with_capacity(group.sessions.len());
    for s in &group.sessions {
        let ctx = |e: Error| e.context(format!("utterance {}", s.utterance_id));
        waves.push(read_wav(&s.path).map_err(ctx)?);
        keys.push(file_key(&s.path).map_err(ctx)?);
    }
    let n = waves.len();
    let mut out = BTreeMap::new();

    let mut orig = Vec::with_capacity(n);
    for (i, s) in group.sessions.iter().enumerate() {
        let f = cache.features(&keys[i], || Ok(waves[i].clone())).map_err(|e| e.context(format!("utterance {}", s.utterance_id)))?;
        orig.push(f);
    }
    out.insert(ORIGINAL_SYSTEM.to_string(), FeatureMatrix::concat(&orig)?);

    for aug in augmenters {
        let mut parts = Vec::new();
        for (i, s) in group.sessions.iter().enumerate() {
            // round-robin partner within the group; a lone session mixes with itself
            let p = (i + 1) % n;
            let ctx = |e: Error| e.context(format!("system {} utterance {}", aug.spec.system, s.utterance_id));
            let needs_partner = matches!(aug.spec.kind, AugmentKind::SoundMix);
            let variants = aug.apply(&waves[i], &waves[p]).map_err(ctx)?;
            for (v, wave) in variants.into_iter().enumerate() {
                let mut key = format!("{}|{}|{v}", keys[i], aug.describe());
                if needs_partner {
                    key.push_str(&format!("|{}", keys[p]));
                }
                parts.push(cache.features(&key, || Ok(wave)).map_err(ctx)?);
            }
        }
        out.insert(aug.spec.system.clone(), FeatureMatrix::concat(&parts)?);
    }
    Ok(out)
}
