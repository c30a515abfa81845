//! Trial protocol, detection metrics, score fusion and report tables.

mod fusion;
mod metrics;
mod report;
mod trials;

pub use fusion::{fuse_score_sets, fuse_scores, FusionMethod};
pub use metrics::{compute_eer, compute_min_dcf, det_points, DcfParams, DetPoint, Eer, MinDcf};
pub use report::{evaluate_trials, EvalReport, ReportTable, TypeResult, NONTARGET_TYPES};
pub use trials::{
    load_score_file, load_trials, parse_score_file, parse_trials, ScoreSet, Trial, TrialList, TrialType,
};
