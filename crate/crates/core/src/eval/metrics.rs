//! Threshold sweeps. A trial is accepted when `score >= threshold`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DcfParams {
    pub c_miss: f64,
    pub c_fa: f64,
    pub p_target: f64,
}

impl Default for DcfParams {
    fn default() -> Self {
        Self { c_miss: 10.0, c_fa: 1.0, p_target: 0.01 }
    }
}

impl DcfParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_miss > 0.0 && self.c_fa > 0.0) {
            return Err(Error::Config("DCF costs must be positive".into()));
        }
        if !(self.p_target > 0.0 && self.p_target < 1.0) {
            return Err(Error::Config("p_target must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn cost(&self, p_miss: f64, p_fa: f64) -> f64 {
        self.c_miss * p_miss * self.p_target + self.c_fa * p_fa * (1.0 - self.p_target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetPoint {
    pub threshold: f64,
    pub p_fa: f64,
    pub p_miss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eer {
    pub percent: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinDcf {
    /// Raw, unnormalized detection cost.
    pub value: f64,
    pub threshold: f64,
}

fn sorted(scores: &[f64], what: &str) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::domain(format!("no {what} scores")));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::domain(format!("NaN among {what} scores")));
    }
    let mut v = scores.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// One point per distinct score used as threshold, then reject-all at +inf.
/// The first point (lowest threshold) accepts everything.
pub fn det_points(targets: &[f64], nontargets: &[f64]) -> Result<Vec<DetPoint>> {
    let tar = sorted(targets, "target")?;
    let non = sorted(nontargets, "non-target")?;
    let (nt, nn) = (tar.len() as f64, non.len() as f64);
    let mut thresholds: Vec<f64> = tar.iter().chain(&non).copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    thresholds.push(f64::INFINITY);

    let (mut below_t, mut below_n) = (0usize, 0usize);
    let mut points = Vec::with_capacity(thresholds.len());
    for th in thresholds {
        while below_t < tar.len() && tar[below_t] < th {
            below_t += 1;
        }
        while below_n < non.len() && non[below_n] < th {
            below_n += 1;
        }
        points.push(DetPoint {
            threshold: th,
            p_miss: below_t as f64 / nt,
            p_fa: (non.len() - below_n) as f64 / nn,
        });
    }
    Ok(points)
}

/// Crossing of miss and false-alarm rates, linearly interpolated between sweep points.
pub fn compute_eer(targets: &[f64], nontargets: &[f64]) -> Result<Eer> {
    let points = det_points(targets, nontargets)?;
    let i = points
        .iter()
        .position(|p| p.p_miss >= p.p_fa)
        .expect("reject-all point always has p_miss >= p_fa");
    let cur = points[i];
    if cur.p_miss == cur.p_fa || i == 0 {
        return Ok(Eer { percent: 100.0 * cur.p_miss, threshold: cur.threshold });
    }
    let prev = points[i - 1];
    let gap_prev = prev.p_fa - prev.p_miss;
    let gap_cur = cur.p_miss - cur.p_fa;
    let t = gap_prev / (gap_prev + gap_cur);
    let rate = prev.p_miss + t * (cur.p_miss - prev.p_miss);
    let threshold = if cur.threshold.is_finite() {
        prev.threshold + t * (cur.threshold - prev.threshold)
    } else {
        prev.threshold
    };
    Ok(Eer { percent: 100.0 * rate, threshold })
}

/// Minimum raw DCF over every sweep threshold, accept-all and reject-all included.
pub fn compute_min_dcf(targets: &[f64], nontargets: &[f64], params: &DcfParams) -> Result<MinDcf> {
    params.validate()?;
    let points = det_points(targets, nontargets)?;
    let mut best = MinDcf { value: f64::INFINITY, threshold: f64::NAN };
    for p in points {
        let c = params.cost(p.p_miss, p.p_fa);
        if c < best.value {
            best = MinDcf { value: c, threshold: p.threshold };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_separation() {
        let e = compute_eer(&[2.0, 3.0, 4.0], &[-4.0, -3.0, -2.0]).unwrap();
        assert_eq!(e.percent, 0.0);
        let d = compute_min_dcf(&[2.0, 3.0, 4.0], &[-4.0, -3.0, -2.0], &DcfParams::default()).unwrap();
        assert_eq!(d.value, 0.0);
    }

    #[test]
    fn identical_sets_give_fifty_percent() {
        assert!((compute_eer(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap().percent - 50.0).abs() < 1e-12);
        assert!((compute_eer(&[1.0], &[1.0]).unwrap().percent - 50.0).abs() < 1e-12);
    }

    #[test]
    fn det_single_scores() {
        let p = det_points(&[1.0], &[0.0]).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!((p[0].p_fa, p[0].p_miss), (1.0, 0.0));
        assert_eq!((p[1].p_fa, p[1].p_miss), (0.0, 0.0));
        assert_eq!((p[2].p_fa, p[2].p_miss), (0.0, 1.0));
    }

    #[test]
    fn det_is_monotone() {
        let p = det_points(&[0.3, 1.2, -0.4, 2.2, 0.3], &[-1.0, 0.3, 0.1, -2.0]).unwrap();
        for w in p.windows(2) {
            assert!(w[1].p_fa <= w[0].p_fa);
            assert!(w[1].p_miss >= w[0].p_miss);
        }
    }

    #[test]
    fn min_dcf_reject_all_bound() {
        let d = compute_min_dcf(&[0.0, 0.1], &[0.5, 0.6], &DcfParams::default()).unwrap();
        assert!((d.value - 0.1).abs() < 1e-15);
        assert_eq!(d.threshold, f64::INFINITY);
    }

    #[test]
    fn empty_inputs() {
        assert!(matches!(compute_eer(&[], &[1.0]), Err(Error::Domain(_))));
        assert!(matches!(compute_min_dcf(&[1.0], &[], &DcfParams::default()), Err(Error::Domain(_))));
        assert!(det_points(&[f64::NAN], &[1.0]).is_err());
    }
}
