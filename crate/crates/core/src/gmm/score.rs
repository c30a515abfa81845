use super::model::DiagGmm;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// `ln p(x_t | model)` for every row.
pub fn frame_log_likelihoods(model: &DiagGmm, frames: &FeatureMatrix) -> Result<Vec<f64>> {
    model.check_dim(frames.n_dims())?;
    let mut scratch = vec![0.0; model.n_components()];
    Ok(frames.rows().map(|x| model.log_density(x, &mut scratch)).collect())
}

/// Frame-averaged log-likelihood ratio against precomputed background frame scores.
pub fn llr_from_frame_lls(speaker: &DiagGmm, ubm_lls: &[f64], test: &FeatureMatrix) -> Result<f64> {
    speaker.check_dim(test.n_dims())?;
    if test.n_rows() == 0 {
        return Err(Error::domain("test utterance has no frames"));
    }
    if ubm_lls.len() != test.n_rows() {
        return Err(Error::domain("background scores do not match the test frames"));
    }
    let mut scratch = vec![0.0; speaker.n_components()];
    let sum: f64 = test
        .rows()
        .zip(ubm_lls)
        .map(|(x, ubm)| speaker.log_density(x, &mut scratch) - ubm)
        .sum();
    let score = sum / test.n_rows() as f64;
    if !score.is_finite() {
        return Err(Error::Numeric(format!("non-finite LLR {score}")));
    }
    Ok(score)
}

/// `1/T sum_t [ln p(x_t | speaker) - ln p(x_t | ubm)]`.
pub fn llr_score(speaker: &DiagGmm, ubm: &DiagGmm, test: &FeatureMatrix) -> Result<f64> {
    if test.n_rows() == 0 {
        return Err(Error::domain("test utterance has no frames"));
    }
    if speaker.dim() != ubm.dim() {
        return Err(Error::domain("speaker and background models differ in dimension"));
    }
    let ubm_lls = frame_log_likelihoods(ubm, test)?;
    llr_from_frame_lls(speaker, &ubm_lls, test)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(shift: f64) -> DiagGmm {
        DiagGmm::new(vec![0.3, 0.7], vec![shift, 0.0, 1.0, shift], vec![1.0, 0.5, 2.0, 1.5]).unwrap()
    }

    #[test]
    fn same_model_scores_zero() {
        let x = FeatureMatrix::new(2, vec![0.1, 0.2, -1.0, 3.0, 0.5, 0.5], Vec::new()).unwrap();
        assert_eq!(llr_score(&model(0.4), &model(0.4), &x).unwrap(), 0.0);
    }

    #[test]
    fn empty_test_rejected() {
        let x = FeatureMatrix::new(2, vec![], Vec::new()).unwrap();
        assert!(matches!(llr_score(&model(0.0), &model(1.0), &x), Err(Error::Domain(_))));
    }
}
