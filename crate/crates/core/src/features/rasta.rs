use super::FeatureMatrix;

const NUMERATOR: [f64; 5] = [0.2, 0.1, 0.0, -0.1, -0.2];
const POLE: f64 = 0.98;

/// RASTA band-pass `0.1 (2 + z^-1 - z^-3 - 2 z^-4) / (1 - 0.98 z^-1)` run causally
/// along each cepstral trajectory from zero initial state.
pub fn rasta_filter(ceps: &FeatureMatrix) -> FeatureMatrix {
    let (rows, dims) = (ceps.n_rows(), ceps.n_dims());
    let mut out = vec![0.0; rows * dims];
    for d in 0..dims {
        let mut prev_y = 0.0;
        for t in 0..rows {
            let x = |k: usize| if t >= k { ceps.get(t - k, d) } else { 0.0 };
            // antisymmetric taps paired so a constant trajectory cancels exactly
            let y = POLE * prev_y + NUMERATOR[0] * (x(0) - x(4)) + NUMERATOR[1] * (x(1) - x(3));
            out[t * dims + d] = y;
            prev_y = y;
        }
    }
    FeatureMatrix::new(dims, out, ceps.frame_times.clone()).expect("shape preserved")
}
