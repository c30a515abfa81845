use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::cache::{file_key, FeatureCache};
use super::config::{multi_condition_id, ExperimentConfig, FusionGroup, ORIGINAL_SYSTEM};
use super::enroll::{enroll_all, enrollment_groups, Augmenter, SpeakerModelSet};
use super::scoring::{score_trials, Condition};
use crate::audio::{load_manifest, read_wav, Manifest};
use crate::error::{Error, Result};
use crate::eval::{evaluate_trials, fuse_score_sets, load_trials, ReportTable, ScoreSet, TrialList};
use crate::features::FeatureMatrix;
use crate::gmm::{save_gmm, train_ubm_with_report, DiagGmm, EmReport};

/// Present in the output directory while a run is in progress or after it failed.
pub const INCOMPLETE_MARKER: &str = "RUN_INCOMPLETE";

/// Everything a finished run produced, in memory.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub ubm_report: EmReport,
    /// Per condition, in run order.
    pub reports: Vec<(String, ReportTable)>,
    /// Per condition: system id -> scores as written to disk (fusions included).
    pub scores: Vec<(String, BTreeMap<String, ScoreSet>)>,
    pub frame_counts: BTreeMap<(String, String), usize>,
}

impl RunSummary {
    pub fn report(&self, condition: &str) -> Option<&ReportTable> {
        self.reports.iter().find(|(c, _)| c == condition).map(|(_, r)| r)
    }

    pub fn scores(&self, condition: &str) -> Option<&BTreeMap<String, ScoreSet>> {
        self.scores.iter().find(|(c, _)| c == condition).map(|(_, s)| s)
    }
}

pub struct Corpus {
    pub ubm: Manifest,
    pub enroll: Manifest,
    pub test: Manifest,
    pub trials: TrialList,
}

pub fn load_corpus(cfg: &ExperimentConfig) -> Result<Corpus> {
    let c = &cfg.corpus;
    let ctx = |what: &'static str| move |e: Error| e.context(format!("loading {what}"));
    Ok(Corpus {
        ubm: load_manifest(&c.ubm).map_err(ctx("ubm manifest"))?,
        enroll: load_manifest(&c.enroll).map_err(ctx("enrollment manifest"))?,
        test: load_manifest(&c.test).map_err(ctx("test manifest"))?,
        trials: load_trials(&c.trials).map_err(ctx("trial list"))?,
    })
}

pub fn ubm_features(manifest: &Manifest, cache: &FeatureCache) -> Result<FeatureMatrix> {
    let mut parts = Vec::with_capacity(manifest.len());
    for e in &manifest.entries {
        let ctx = |err: Error| err.context(format!("ubm utterance {}", e.utterance_id));
        let key = file_key(&e.path).map_err(ctx)?;
        parts.push(cache.features(&key, || read_wav(&e.path)).map_err(ctx)?);
    }
    FeatureMatrix::concat(&parts)
}

pub fn train_ubm_stage(cfg: &ExperimentConfig, manifest: &Manifest, cache: &FeatureCache) -> Result<(DiagGmm, EmReport)> {
    let data = ubm_features(manifest, cache)?;
    log::info!("training {}-component UBM on {} frames", cfg.ubm.k, data.n_rows());
    let (ubm, report) = train_ubm_with_report(&data, cfg.ubm.k, &cfg.ubm.em)?;
    for w in &report.warnings {
        log::warn!("ubm: {w}");
    }
    Ok((ubm, report))
}

pub fn augmenters(cfg: &ExperimentConfig) -> Result<Vec<Augmenter>> {
    cfg.augment.iter().map(Augmenter::new).collect()
}

/// Clean first, then every (noise, SNR) pair in config order.
pub fn conditions(cfg: &ExperimentConfig) -> Result<Vec<Condition>> {
    let mut out = vec![Condition::Clean];
    if let Some(noise) = &cfg.noise {
        let manifest = load_manifest(&noise.manifest).map_err(|e| e.context("loading noise manifest"))?;
        for entry in &manifest.entries {
            let clip = read_wav(&entry.path).map_err(|e| e.context(format!("noise {}", entry.utterance_id)))?;
            for &snr_db in &noise.snr_db {
                out.push(Condition::Noisy { noise: entry.utterance_id.clone(), snr_db, clip: clip.clone() });
            }
        }
    }
    Ok(out)
}

pub fn fusion_label(group: &FusionGroup, method: crate::eval::FusionMethod) -> String {
    format!("{} {}", group.label(), method.as_str())
}

/// Report rows for one condition, evaluated on `scores` as stored on disk.
pub fn build_report(
    cfg: &ExperimentConfig,
    condition: &str,
    trials: &TrialList,
    scores: &BTreeMap<String, ScoreSet>,
) -> Result<ReportTable> {
    let mut table = ReportTable::new(format!("condition: {condition}"), cfg.dcf);
    let mut row = |label: String, system: &str| -> Result<()> {
        let set = scores.get(system).ok_or_else(|| Error::Incomplete { missing: vec![format!("scores for {system}")] })?;
        let r = evaluate_trials(trials, set, &cfg.dcf).map_err(|e| e.context(format!("evaluating {system} ({condition})")))?;
        table.push(label, r);
        Ok(())
    };
    row(ORIGINAL_SYSTEM.into(), ORIGINAL_SYSTEM)?;
    for a in &cfg.augment {
        row(format!("{} {}", a.system, a.kind.name()), &a.system)?;
    }
    for group in &cfg.fusion {
        for &m in &group.methods {
            row(fusion_label(group, m), &group.system_id(m))?;
        }
    }
    if let Some(mc) = &cfg.multi_condition {
        row(format!("multi-condition ({})", mc.join(",")), &multi_condition_id(mc))?;
    }
    Ok(table)
}

/// Quantizes per-system scores to their file form and adds every fusion.
pub fn with_fusions(cfg: &ExperimentConfig, raw: BTreeMap<String, ScoreSet>) -> Result<BTreeMap<String, ScoreSet>> {
    let mut sets: BTreeMap<String, ScoreSet> = raw.into_iter().map(|(k, v)| (k, v.quantized())).collect();
    for group in &cfg.fusion {
        let members: Vec<&ScoreSet> = group
            .systems
            .iter()
            .map(|s| sets.get(s).ok_or_else(|| Error::Incomplete { missing: vec![format!("scores for {s}")] }))
            .collect::<Result<_>>()?;
        let mut fused = Vec::new();
        for &m in &group.methods {
            let id = group.system_id(m);
            fused.push((id.clone(), fuse_score_sets(&members, m, &id)?.quantized()));
        }
        sets.extend(fused);
    }
    Ok(sets)
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Every enrolled system's id, checked against the trial list's models.
fn check_models(corpus: &Corpus) -> Result<()> {
    let groups: std::collections::BTreeSet<String> =
        enrollment_groups(&corpus.enroll).into_iter().map(|g| g.model_id).collect();
    let mut missing: Vec<String> = corpus
        .trials
        .trials
        .iter()
        .filter(|t| !groups.contains(&t.model_id))
        .map(|t| format!("enrollment for model {}", t.model_id))
        .collect();
    missing.extend(
        corpus.trials.trials.iter().filter(|t| corpus.test.get(&t.utterance_id).is_none()).map(|t| format!("test utterance {}", t.utterance_id)),
    );
    missing.sort();
    missing.dedup();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::Incomplete { missing })
    }
}

/// Full pipeline. Artifacts go under `cfg.output_dir`; the incomplete marker
/// is removed only when every stage succeeded.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let out = &cfg.output_dir;
    let marker = out.join(INCOMPLETE_MARKER);
    write(&marker, "outputs in this directory are stale or partial\n")?;

    let corpus = load_corpus(cfg).map_err(|e| e.context("stage corpus"))?;
    check_models(&corpus).map_err(|e| e.context("stage corpus"))?;
    let cache = FeatureCache::new(cfg.cache_dir.clone(), &cfg.frontend)?;

    let (ubm, ubm_report) = train_ubm_stage(cfg, &corpus.ubm, &cache).map_err(|e| e.context("stage train-ubm"))?;
    save_gmm(&ubm, out.join("ubm.json"))?;

    let augs = augmenters(cfg).map_err(|e| e.context("stage enroll"))?;
    let models = enroll_all(&ubm, &corpus.enroll, &augs, &cfg.map, cfg.multi_condition.as_deref(), &cache)
        .map_err(|e| e.context("stage enroll"))?;
    models.save(&out.join("models"))?;
    log::info!("enrolled {} models", models.len());

    let systems = cfg.systems();
    let conds = conditions(cfg).map_err(|e| e.context("stage score"))?;
    let mut reports = Vec::new();
    let mut all_scores = Vec::new();
    let mut summary = String::new();
    for cond in &conds {
        let label = cond.label();
        log::info!("scoring condition {label}");
        let raw = score_trials(&models, &ubm, &corpus.trials, &corpus.test, &systems, cond, &cache)
            .map_err(|e| e.context(format!("stage score ({label})")))?;
        let sets = with_fusions(cfg, raw).map_err(|e| e.context(format!("stage fuse ({label})")))?;
        for (id, set) in &sets {
            write(&out.join("scores").join(&label).join(format!("{id}.tsv")), set.to_tsv())?;
        }
        let table = build_report(cfg, &label, &corpus.trials, &sets).map_err(|e| e.context("stage evaluate"))?;
        write(&out.join("reports").join(format!("{label}.tsv")), table.to_tsv())?;
        write(&out.join("reports").join(format!("{label}.txt")), table.to_text())?;
        summary.push_str(&table.to_text());
        summary.push('\n');
        reports.push((label.clone(), table));
        all_scores.push((label, sets));
    }

    let mut head = String::new();
    writeln!(head, "ubm: {} components, {} EM iterations, converged: {}", ubm.n_components(), ubm_report.iterations, ubm_report.converged).unwrap();
    writeln!(head, "models: {} ({} systems), trials: {}", models.len(), systems.len(), corpus.trials.len()).unwrap();
    for kind in crate::eval::TrialType::ALL {
        writeln!(head, "  {kind}: {}", corpus.trials.count(kind)).unwrap();
    }
    head.push('\n');
    write(&out.join("summary.txt"), head + &summary)?;

    fs::remove_file(&marker).map_err(|e| Error::io(&marker, e))?;
    Ok(RunSummary { ubm_report, reports, scores: all_scores, frame_counts: models.frame_counts.clone() })
}

/// Loads models saved by a previous enrollment for the listed systems.
pub fn load_models(out: &Path, systems: &[String]) -> Result<SpeakerModelSet> {
    SpeakerModelSet::load(&out.join("models"), systems)
}
