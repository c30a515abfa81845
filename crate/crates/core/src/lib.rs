//! Text-dependent speaker verification with GMM-UBM models and
//! enrollment-time data augmentation.
//!
//! The pipeline runs audio I/O and a synthetic corpus ([`audio`]), an MFCC
//! front-end ([`features`]), augmentation transforms ([`augment`]), diagonal
//! GMMs with MAP enrollment and LLR scoring ([`gmm`]), detection metrics and
//! fusion ([`eval`]), and experiment orchestration ([`experiment`]).

pub mod audio;
pub mod augment;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod features;
pub mod gmm;

pub use error::{Error, Result};
