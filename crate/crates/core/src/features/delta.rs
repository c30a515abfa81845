use super::FeatureMatrix;

/// Regression deltas over `±window` frames, replicating the edge frames.
pub fn delta(features: &FeatureMatrix, window: usize) -> FeatureMatrix {
    let (rows, dims) = (features.n_rows(), features.n_dims());
    let denom = 2.0 * (1..=window).map(|k| (k * k) as f64).sum::<f64>();
    let clamp = |t: isize| t.clamp(0, rows as isize - 1) as usize;
    let mut out = vec![0.0; rows * dims];
    for t in 0..rows {
        for d in 0..dims {
            let mut acc = 0.0;
            for k in 1..=window {
                let ahead = features.get(clamp(t as isize + k as isize), d);
                let behind = features.get(clamp(t as isize - k as isize), d);
                acc += k as f64 * (ahead - behind);
            }
            out[t * dims + d] = acc / denom;
        }
    }
    FeatureMatrix::new(dims, out, features.frame_times.clone()).expect("shape preserved")
}

/// `[c, Δc, ΔΔc]` per row.
pub fn append_deltas(statics: &FeatureMatrix, window: usize) -> FeatureMatrix {
    let d1 = delta(statics, window);
    let d2 = delta(&d1, window);
    let dims = statics.n_dims();
    let mut data = Vec::with_capacity(statics.as_slice().len() * 3);
    for t in 0..statics.n_rows() {
        data.extend_from_slice(statics.row(t));
        data.extend_from_slice(d1.row(t));
        data.extend_from_slice(d2.row(t));
    }
    FeatureMatrix::new(3 * dims, data, statics.frame_times.clone()).expect("shape preserved")
}
