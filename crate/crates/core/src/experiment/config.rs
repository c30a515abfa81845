use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::augment::{AugmentKind, AugmentSpec};
use crate::error::{Error, Result};
use crate::eval::{DcfParams, FusionMethod};
use crate::features::FrontendConfig;
use crate::gmm::{EmConfig, MapConfig};

/// Id of the system enrolled on unmodified data.
pub const ORIGINAL_SYSTEM: &str = "a";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    pub ubm: PathBuf,
    pub enroll: PathBuf,
    pub test: PathBuf,
    pub trials: PathBuf,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            ubm: "corpus/ubm.tsv".into(),
            enroll: "corpus/enroll.tsv".into(),
            test: "corpus/test.tsv".into(),
            trials: "corpus/trials.tsv".into(),
        }
    }
}

/// Parameters of the synthetic corpus generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub out_dir: PathBuf,
    pub n_targets: usize,
    pub n_ubm_speakers: usize,
    pub n_phrases: usize,
    pub sessions: usize,
    pub test_sessions: usize,
    pub ubm_sessions: usize,
    pub sample_rate: u32,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            out_dir: "corpus".into(),
            n_targets: 20,
            n_ubm_speakers: 40,
            n_phrases: 3,
            sessions: 3,
            test_sessions: 2,
            ubm_sessions: 2,
            sample_rate: 16000,
            seed: 2024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UbmConfig {
    pub k: usize,
    pub em: EmConfig,
}

impl Default for UbmConfig {
    fn default() -> Self {
        Self { k: 64, em: EmConfig::default() }
    }
}

/// One fused system: member systems and the fusion rules to apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FusionGroup {
    pub systems: Vec<String>,
    pub methods: Vec<FusionMethod>,
}

impl FusionGroup {
    pub fn label(&self) -> String {
        format!("({})", self.systems.join(","))
    }

    pub fn system_id(&self, method: FusionMethod) -> String {
        format!("fusion-{}-{}", self.systems.join(""), method.as_str())
    }
}

/// Noise clips for the mismatched test conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// Manifest whose utterance ids name the noise types.
    pub manifest: PathBuf,
    pub snr_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub corpus: CorpusConfig,
    pub synth: SynthConfig,
    pub frontend: FrontendConfig,
    pub ubm: UbmConfig,
    pub map: MapConfig,
    pub dcf: DcfParams,
    pub augment: Vec<AugmentSpec>,
    pub fusion: Vec<FusionGroup>,
    pub noise: Option<NoiseConfig>,
    /// Systems pooled into one multi-condition model; an empty list disables it.
    pub multi_condition: Option<Vec<String>>,
    pub output_dir: PathBuf,
    /// Feature cache directory; extraction is repeated when unset.
    pub cache_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let sys = |s: &str| s.to_string();
        Self {
            corpus: CorpusConfig::default(),
            synth: SynthConfig::default(),
            frontend: FrontendConfig::default(),
            ubm: UbmConfig::default(),
            map: MapConfig::default(),
            dcf: DcfParams::default(),
            augment: default_augmentations(),
            fusion: vec![
                FusionGroup {
                    systems: ["a", "b", "c", "d", "e", "f"].map(sys).to_vec(),
                    methods: FusionMethod::ALL.to_vec(),
                },
                FusionGroup { systems: ["a", "b", "f"].map(sys).to_vec(), methods: vec![FusionMethod::Maximum] },
            ],
            noise: None,
            multi_condition: Some(["a", "b", "f"].map(sys).to_vec()),
            output_dir: "out".into(),
            cache_dir: None,
        }
    }
}

/// Systems b..f of the reference layout.
pub fn default_augmentations() -> Vec<AugmentSpec> {
    let spec = |system: &str, kind| AugmentSpec { system: system.into(), kind };
    vec![
        spec("b", AugmentKind::Wow { a: 3.0, f: 2.0 }),
        spec("c", AugmentKind::PitchShift { semitones: vec![1, 2] }),
        spec("d", AugmentKind::HarmonicDistortion { depth: 5 }),
        spec("e", AugmentKind::ImpulseResponse { ir_path: "corpus/fixtures/hall_ir.wav".into() }),
        spec("f", AugmentKind::SoundMix),
    ]
}

/// Multi-condition system id for a pooled subset.
pub fn multi_condition_id(subset: &[String]) -> String {
    format!("multi-{}", subset.join(""))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.multi_condition.as_ref().is_some_and(Vec::is_empty) {
            cfg.multi_condition = None;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a config; relative paths resolve against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| e.context(path.display().to_string()))?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new("")));
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.corpus.ubm);
        fix(&mut self.corpus.enroll);
        fix(&mut self.corpus.test);
        fix(&mut self.corpus.trials);
        fix(&mut self.synth.out_dir);
        fix(&mut self.output_dir);
        if let Some(c) = self.cache_dir.as_mut() {
            fix(c);
        }
        if let Some(n) = self.noise.as_mut() {
            fix(&mut n.manifest);
        }
        for spec in &mut self.augment {
            if let AugmentKind::ImpulseResponse { ir_path } = &mut spec.kind {
                fix(ir_path);
            }
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Every enrolled system id (original, augmentations, multi-condition).
    pub fn systems(&self) -> Vec<String> {
        let mut out = vec![ORIGINAL_SYSTEM.to_string()];
        out.extend(self.augment.iter().map(|a| a.system.clone()));
        if let Some(mc) = &self.multi_condition {
            out.push(multi_condition_id(mc));
        }
        out
    }

    fn base_systems(&self) -> BTreeSet<&str> {
        std::iter::once(ORIGINAL_SYSTEM).chain(self.augment.iter().map(|a| a.system.as_str())).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        self.frontend.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.ubm.em.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.map.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.dcf.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.ubm.k == 0 {
            return bad("ubm.k must be positive".into());
        }
        let mut seen = BTreeSet::from([ORIGINAL_SYSTEM]);
        for spec in &self.augment {
            if !seen.insert(spec.system.as_str()) {
                return bad(format!("duplicate system id '{}'", spec.system));
            }
            if spec.system.is_empty() || spec.system.contains(['\t', '/', '\\']) || spec.system.starts_with("fusion-") || spec.system.starts_with("multi-") {
                return bad(format!("invalid system id '{}'", spec.system));
            }
            if let AugmentKind::PitchShift { semitones } = &spec.kind {
                if semitones.is_empty() || semitones.iter().any(|s| !(-12..=12).contains(s)) {
                    return bad(format!("system {}: semitones must be nonempty and within [-12, 12]", spec.system));
                }
            }
        }
        let base = self.base_systems();
        for group in &self.fusion {
            if group.systems.is_empty() || group.methods.is_empty() {
                return bad("fusion groups need at least one system and one method".into());
            }
            if let Some(s) = group.systems.iter().find(|s| !base.contains(s.as_str())) {
                return bad(format!("fusion references unknown system '{s}'"));
            }
        }
        if let Some(mc) = &self.multi_condition {
            if mc.is_empty() {
                return bad("multi_condition subset is empty".into());
            }
            if let Some(s) = mc.iter().find(|s| !base.contains(s.as_str())) {
                return bad(format!("multi_condition references unknown system '{s}'"));
            }
        }
        if let Some(noise) = &self.noise {
            if noise.snr_db.iter().any(|s| !s.is_finite()) {
                return bad("noise.snr_db values must be finite".into());
            }
        }
        let s = &self.synth;
        if s.n_targets < 2 || s.n_phrases < 2 || s.sessions == 0 || s.test_sessions == 0 || s.n_ubm_speakers == 0 {
            return bad("synth needs >= 2 targets, >= 2 phrases and nonzero session counts".into());
        }
        Ok(())
    }
}
