//! Experiment orchestration: synthetic corpus, UBM training, per-system
//! enrollment, clean and noisy scoring, fusion and reports.

mod cache;
mod config;
mod corpus;
mod enroll;
mod run;
mod scoring;

pub use cache::{file_key, FeatureCache};
pub use config::{
    default_augmentations, multi_condition_id, CorpusConfig, ExperimentConfig, FusionGroup, NoiseConfig, SynthConfig,
    UbmConfig, ORIGINAL_SYSTEM,
};
pub use corpus::{build_trials, gen_synth_corpus, phrase_id, speaker_spec, CorpusSummary};
pub use enroll::{enroll_all, enrollment_groups, group_features, model_id, Augmenter, EnrollmentGroup, SpeakerModelSet};
pub use run::{
    augmenters, build_report, conditions, fusion_label, load_corpus, load_models, run_experiment, train_ubm_stage,
    ubm_features, with_fusions, Corpus, RunSummary, INCOMPLETE_MARKER,
};
pub use scoring::{score_trials, Condition};
