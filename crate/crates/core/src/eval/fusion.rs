use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::trials::ScoreSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionMethod {
    Average,
    Minimum,
    Maximum,
    Median,
}

impl FusionMethod {
    pub const ALL: [FusionMethod; 4] =
        [FusionMethod::Average, FusionMethod::Minimum, FusionMethod::Maximum, FusionMethod::Median];

    pub fn as_str(self) -> &'static str {
        match self {
            FusionMethod::Average => "average",
            FusionMethod::Minimum => "minimum",
            FusionMethod::Maximum => "maximum",
            FusionMethod::Median => "median",
        }
    }
}

impl fmt::Display for FusionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FusionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "average" | "mean" => Ok(FusionMethod::Average),
            "minimum" | "min" => Ok(FusionMethod::Minimum),
            "maximum" | "max" => Ok(FusionMethod::Maximum),
            "median" => Ok(FusionMethod::Median),
            _ => Err(Error::Config(format!("unknown fusion method `{s}`"))),
        }
    }
}

/// Combines one trial's per-system scores.
pub fn fuse_scores(scores: &[f64], method: FusionMethod) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::domain("nothing to fuse"));
    }
    Ok(match method {
        FusionMethod::Average => {
            let mean = scores.iter().sum::<f64>() / scores.len() as f64;
            // rounding can push the mean of near-equal scores past their extremes
            let (lo, hi) = scores.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &s| (l.min(s), h.max(s)));
            mean.clamp(lo, hi)
        }
        FusionMethod::Minimum => scores.iter().copied().fold(f64::INFINITY, f64::min),
        FusionMethod::Maximum => scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        FusionMethod::Median => {
            let mut v = scores.to_vec();
            v.sort_by(f64::total_cmp);
            let mid = v.len() / 2;
            if v.len() % 2 == 1 {
                v[mid]
            } else {
                0.5 * (v[mid - 1] + v[mid])
            }
        }
    })
}

/// Fuses trial-aligned score sets; every set must score the first set's trials.
pub fn fuse_score_sets(sets: &[&ScoreSet], method: FusionMethod, system_id: &str) -> Result<ScoreSet> {
    let first = sets.first().ok_or_else(|| Error::domain("no systems to fuse"))?;
    let mut missing = Vec::new();
    for s in &sets[1..] {
        if s.len() != first.len() {
            missing.push(format!("system {} has {} scores, expected {}", s.system_id, s.len(), first.len()));
        }
    }
    let mut fused = ScoreSet::new(system_id);
    let mut buf = Vec::with_capacity(sets.len());
    for (m, u) in first.scores.keys() {
        buf.clear();
        for s in sets {
            match s.get(m, u) {
                Some(v) => buf.push(v),
                None => missing.push(format!("{}:{m}/{u}", s.system_id)),
            }
        }
        if buf.len() == sets.len() {
            fused.insert(m, u, fuse_scores(&buf, method)?)?;
        }
    }
    if !missing.is_empty() {
        return Err(Error::Incomplete { missing });
    }
    Ok(fused)
}
