//! Diagonal-covariance GMMs: EM-trained background model, MAP-adapted speaker
//! models and frame-averaged log-likelihood-ratio scoring.

mod em;
mod io;
mod map;
mod model;
mod score;
mod stats;

pub use em::{train_ubm, train_ubm_with_report, EmConfig, EmReport};
pub use io::{gmm_from_json, gmm_to_json, load_gmm, save_gmm};
pub use map::{map_adapt, MapConfig};
pub use model::{gmm_log_likelihood, DiagGmm};
pub use score::{frame_log_likelihoods, llr_from_frame_lls, llr_score};
pub use stats::SuffStats;
