use super::{Frames, FrontendConfig};

fn energy_db(frame: &[f64]) -> f64 {
    let e: f64 = frame.iter().map(|x| x * x).sum();
    10.0 * (e + 1e-30).log10()
}

/// Keeps frames within `vad_threshold_db` of the loudest frame, which is always kept.
pub fn energy_vad(frames: &Frames, cfg: &FrontendConfig) -> Vec<bool> {
    let energies: Vec<f64> = frames.iter().map(energy_db).collect();
    let max = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cut = max - cfg.vad_threshold_db;
    energies.iter().map(|&e| e >= cut).collect()
}
