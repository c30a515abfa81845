use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tdsv::audio::{read_wav, write_wav};
use tdsv::eval::{evaluate_trials, fuse_score_sets, load_score_file, load_trials, FusionMethod, ReportTable, ScoreSet};
use tdsv::experiment::{
    self, augmenters, conditions, enrollment_groups, gen_synth_corpus, load_corpus, load_models, score_trials,
    train_ubm_stage, Augmenter, ExperimentConfig, FeatureCache,
};
use tdsv::features::{extract_features, write_fmx};
use tdsv::gmm::{load_gmm, save_gmm};
use tdsv::{Error, Result};

#[derive(Parser)]
#[command(name = "tdsv", version, about = "Text-dependent speaker verification with enrollment-data augmentation")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Experiment config (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (or file, for single-output commands).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated system ids to keep (`a` is always kept).
    #[arg(long, global = true, value_delimiter = ',')]
    systems: Option<Vec<String>>,
    /// Comma-separated SNRs in dB, replacing the configured list.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    snr: Option<Vec<f64>>,
    /// Comma-separated fusion methods, replacing every group's methods.
    #[arg(long = "fusion-method", global = true, value_delimiter = ',')]
    fusion_method: Option<Vec<String>>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic corpus, trial list, noise clips and IR fixture.
    Synth,
    /// Apply one configured augmentation system to a WAV file.
    Augment {
        #[arg(long)]
        system: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Partner utterance for sound mix (defaults to the input).
        #[arg(long)]
        partner: Option<PathBuf>,
    },
    /// Extract features from a WAV file into an `.fmx` matrix.
    Extract {
        #[arg(long)]
        input: PathBuf,
    },
    /// Train the UBM on the configured background manifest.
    TrainUbm,
    /// MAP-enroll every model for every system.
    Enroll,
    /// Score the trial list under clean and configured noise conditions.
    Score,
    /// Fuse score files system-wise.
    Fuse {
        #[arg(long, num_args = 1.., required = true)]
        scores: Vec<PathBuf>,
        #[arg(long, default_value = "fused")]
        system_id: String,
    },
    /// Evaluate every system in a score file against a trial list.
    Evaluate {
        #[arg(long)]
        trials: Option<PathBuf>,
        #[arg(long)]
        scores: PathBuf,
    },
    /// Full pipeline: train, enroll, score, fuse and report.
    Run,
}

fn load_config(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => {
            let mut c = ExperimentConfig::default();
            c.resolve_paths(&std::env::current_dir().map_err(|e| Error::Config(e.to_string()))?);
            c
        }
    };
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    if let Some(keep) = &common.systems {
        let keep = |s: &String| s == experiment::ORIGINAL_SYSTEM || keep.contains(s);
        cfg.augment.retain(|a| keep(&a.system));
        for g in &mut cfg.fusion {
            g.systems.retain(keep);
        }
        cfg.fusion.retain(|g| !g.systems.is_empty());
        if let Some(mc) = &mut cfg.multi_condition {
            mc.retain(keep);
        }
        if cfg.multi_condition.as_ref().is_some_and(Vec::is_empty) {
            cfg.multi_condition = None;
        }
    }
    if let Some(snr) = &common.snr {
        match &mut cfg.noise {
            Some(n) => n.snr_db = snr.clone(),
            None => return Err(Error::Config("--snr given but no [noise] section is configured".into())),
        }
    }
    if let Some(methods) = &common.fusion_method {
        let methods: Vec<FusionMethod> = methods.iter().map(|m| m.parse()).collect::<Result<_>>()?;
        for g in &mut cfg.fusion {
            g.methods = methods.clone();
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn execute(command: Command, common: &Common) -> Result<()> {
    let cfg = load_config(common)?;
    let out = &cfg.output_dir;
    match command {
        Command::Synth => {
            let mut synth = cfg.synth.clone();
            if let Some(o) = &common.out {
                synth.out_dir = o.clone();
            }
            let s = gen_synth_corpus(&synth)?;
            println!(
                "wrote {}: {} ubm, {} enrollment, {} test utterances; trials {:?}",
                s.root.display(),
                s.n_ubm,
                s.n_enroll,
                s.n_test,
                s.trial_counts
            );
        }
        Command::Augment { system, input, output, partner } => {
            let spec = cfg
                .augment
                .iter()
                .find(|a| a.system == system)
                .ok_or_else(|| Error::Config(format!("no augmentation system '{system}' configured")))?;
            let aug = Augmenter::new(spec)?;
            let wave = read_wav(&input)?;
            let partner = match partner {
                Some(p) => read_wav(p)?,
                None => wave.clone(),
            };
            let variants = aug.apply(&wave, &partner)?;
            if variants.len() == 1 {
                write_wav(&variants[0], &output)?;
            } else {
                let stem = output.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                for (i, v) in variants.iter().enumerate() {
                    write_wav(v, output.with_file_name(format!("{stem}-{i}.wav")))?;
                }
            }
        }
        Command::Extract { input } => {
            let f = extract_features(&read_wav(&input)?, &cfg.frontend)?;
            let dest = common.out.clone().unwrap_or_else(|| input.with_extension("fmx"));
            write_fmx(&f, &dest)?;
            println!("{} rows x {} dims -> {}", f.n_rows(), f.n_dims(), dest.display());
        }
        Command::TrainUbm => {
            let corpus = load_corpus(&cfg)?;
            let cache = FeatureCache::new(cfg.cache_dir.clone(), &cfg.frontend)?;
            let (ubm, report) = train_ubm_stage(&cfg, &corpus.ubm, &cache)?;
            save_gmm(&ubm, out.join("ubm.json"))?;
            println!("ubm: {} iterations, converged: {}", report.iterations, report.converged);
        }
        Command::Enroll => {
            let corpus = load_corpus(&cfg)?;
            let ubm = load_gmm(out.join("ubm.json"))?;
            let cache = FeatureCache::new(cfg.cache_dir.clone(), &cfg.frontend)?;
            let models = experiment::enroll_all(
                &ubm,
                &corpus.enroll,
                &augmenters(&cfg)?,
                &cfg.map,
                cfg.multi_condition.as_deref(),
                &cache,
            )?;
            models.save(&out.join("models"))?;
            println!("{} models for {} groups", models.len(), enrollment_groups(&corpus.enroll).len());
        }
        Command::Score => {
            let corpus = load_corpus(&cfg)?;
            let ubm = load_gmm(out.join("ubm.json"))?;
            let systems = cfg.systems();
            let models = load_models(out, &systems)?;
            let cache = FeatureCache::new(cfg.cache_dir.clone(), &cfg.frontend)?;
            for cond in conditions(&cfg)? {
                let sets = score_trials(&models, &ubm, &corpus.trials, &corpus.test, &systems, &cond, &cache)?;
                for (id, set) in sets {
                    write_text(&out.join("scores").join(cond.label()).join(format!("{id}.tsv")), &set.to_tsv())?;
                }
            }
        }
        Command::Fuse { scores, system_id } => {
            let sets: Vec<ScoreSet> =
                scores.iter().map(load_score_file).collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
            let refs: Vec<&ScoreSet> = sets.iter().collect();
            let methods = match &common.fusion_method {
                Some(m) => m.iter().map(|m| m.parse()).collect::<Result<Vec<FusionMethod>>>()?,
                None => vec![FusionMethod::Maximum],
            };
            let mut text = String::new();
            for m in methods {
                let id = if text.is_empty() && common.fusion_method.as_ref().is_none_or(|v| v.len() == 1) {
                    system_id.clone()
                } else {
                    format!("{system_id}-{}", m.as_str())
                };
                text.push_str(&fuse_score_sets(&refs, m, &id)?.to_tsv());
            }
            match &common.out {
                Some(p) => write_text(p, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Evaluate { trials, scores } => {
            let trials = load_trials(trials.unwrap_or_else(|| cfg.corpus.trials.clone()))?;
            let mut table = ReportTable::new(format!("scores: {}", scores.display()), cfg.dcf);
            for set in load_score_file(&scores)? {
                let r = evaluate_trials(&trials, &set, &cfg.dcf)?;
                table.push(set.system_id.clone(), r);
            }
            print!("{}", table.to_text());
            if let Some(p) = &common.out {
                write_text(p, &table.to_tsv())?;
            }
        }
        Command::Run => {
            let summary = experiment::run_experiment(&cfg)?;
            for (_, table) in &summary.reports {
                println!("{}", table.to_text());
            }
            println!("outputs in {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli.command, &cli.common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
