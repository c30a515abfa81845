use super::FeatureMatrix;
use crate::error::{Error, Result};

/// Per-dimension zero mean, unit (population) variance.
pub fn cmvn(features: &FeatureMatrix) -> Result<FeatureMatrix> {
    let (rows, dims) = (features.n_rows(), features.n_dims());
    if rows < 2 {
        return Err(Error::domain(format!("CMVN needs at least 2 frames, got {rows}")));
    }
    let n = rows as f64;
    let mut mean = vec![0.0; dims];
    for r in features.rows() {
        for (m, x) in mean.iter_mut().zip(r) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; dims];
    for r in features.rows() {
        for ((v, x), m) in var.iter_mut().zip(r).zip(&mean) {
            *v += (x - m) * (x - m);
        }
    }
    let scale: Vec<f64> = var
        .iter()
        .map(|v| {
            let sd = (v / n).sqrt();
            if sd < 1e-12 {
                1.0
            } else {
                1.0 / sd
            }
        })
        .collect();
    let mut data = Vec::with_capacity(rows * dims);
    for r in features.rows() {
        data.extend(r.iter().zip(&mean).zip(&scale).map(|((x, m), s)| (x - m) * s));
    }
    FeatureMatrix::new(dims, data, features.frame_times.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_frames_to_plus_minus_one() {
        let f = FeatureMatrix::new(1, vec![0.0, 2.0], Vec::new()).unwrap();
        assert_eq!(cmvn(&f).unwrap().as_slice(), &[-1.0, 1.0]);
    }

    #[test]
    fn constant_dimension_is_only_centred() {
        let f = FeatureMatrix::new(2, vec![4.0, 1.0, 4.0, 3.0, 4.0, 5.0], Vec::new()).unwrap();
        let out = cmvn(&f).unwrap();
        assert_eq!(out.get(0, 0), 0.0);
        assert_eq!(out.get(2, 0), 0.0);
    }

    #[test]
    fn idempotent() {
        let data: Vec<f64> = (0..60).map(|i| ((i * 37 % 17) as f64).sin() * 3.0 + 1.0).collect();
        let f = FeatureMatrix::new(3, data, Vec::new()).unwrap();
        let once = cmvn(&f).unwrap();
        let twice = cmvn(&once).unwrap();
        for (a, b) in once.as_slice().iter().zip(twice.as_slice()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn one_frame_is_error() {
        let f = FeatureMatrix::new(2, vec![1.0, 2.0], Vec::new()).unwrap();
        assert!(matches!(cmvn(&f), Err(Error::Domain(_))));
    }
}
