use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrialType {
    Genuine,
    TargetWrong,
    ImposterCorrect,
    ImposterWrong,
}

impl TrialType {
    pub const ALL: [TrialType; 4] =
        [TrialType::Genuine, TrialType::TargetWrong, TrialType::ImposterCorrect, TrialType::ImposterWrong];

    pub fn as_str(self) -> &'static str {
        match self {
            TrialType::Genuine => "genuine",
            TrialType::TargetWrong => "target-wrong",
            TrialType::ImposterCorrect => "imposter-correct",
            TrialType::ImposterWrong => "imposter-wrong",
        }
    }

    /// Classifies a (claimed speaker, pass-phrase) against the test utterance's.
    pub fn classify(same_speaker: bool, same_phrase: bool) -> Self {
        match (same_speaker, same_phrase) {
            (true, true) => TrialType::Genuine,
            (true, false) => TrialType::TargetWrong,
            (false, true) => TrialType::ImposterCorrect,
            (false, false) => TrialType::ImposterWrong,
        }
    }
}

impl fmt::Display for TrialType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrialType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        TrialType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown trial type `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trial {
    pub model_id: String,
    pub utterance_id: String,
    pub kind: TrialType,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrialList {
    pub trials: Vec<Trial>,
}

impl TrialList {
    pub fn new(trials: Vec<Trial>) -> Result<Self> {
        let mut seen = HashSet::new();
        for t in &trials {
            if !seen.insert((&t.model_id, &t.utterance_id, t.kind)) {
                return Err(Error::Duplicate(format!("{}/{}/{}", t.model_id, t.utterance_id, t.kind)));
            }
        }
        Ok(Self { trials })
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    pub fn count(&self, kind: TrialType) -> usize {
        self.trials.iter().filter(|t| t.kind == kind).count()
    }

    pub fn to_tsv(&self) -> String {
        self.trials.iter().map(|t| format!("{}\t{}\t{}\n", t.model_id, t.utterance_id, t.kind)).collect()
    }
}

pub fn parse_trials(text: &str) -> Result<TrialList> {
    let mut trials = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::Parse { line: i + 1, reason: format!("expected 3 columns, found {}", cols.len()) });
        }
        let kind = cols[2].parse().map_err(|reason| Error::Parse { line: i + 1, reason })?;
        trials.push(Trial { model_id: cols[0].into(), utterance_id: cols[1].into(), kind });
    }
    TrialList::new(trials)
}

pub fn load_trials(path: impl AsRef<Path>) -> Result<TrialList> {
    let path = path.as_ref();
    parse_trials(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

/// One system's score per (model, utterance).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreSet {
    pub system_id: String,
    pub scores: BTreeMap<(String, String), f64>,
}

impl ScoreSet {
    pub fn new(system_id: impl Into<String>) -> Self {
        Self { system_id: system_id.into(), scores: BTreeMap::new() }
    }

    pub fn insert(&mut self, model_id: &str, utterance_id: &str, score: f64) -> Result<()> {
        if !score.is_finite() {
            return Err(Error::Numeric(format!("non-finite score for {model_id}/{utterance_id}")));
        }
        self.scores.insert((model_id.to_string(), utterance_id.to_string()), score);
        Ok(())
    }

    pub fn get(&self, model_id: &str, utterance_id: &str) -> Option<f64> {
        self.scores.get(&(model_id.to_string(), utterance_id.to_string())).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// `system<TAB>model<TAB>utterance<TAB>score`, 12 significant digits.
    pub fn to_tsv(&self) -> String {
        self.scores
            .iter()
            .map(|((m, u), s)| format!("{}\t{m}\t{u}\t{s:.11e}\n", self.system_id))
            .collect()
    }

    /// The scores as stored in a score file.
    pub fn quantized(&self) -> ScoreSet {
        let scores = self
            .scores
            .iter()
            .map(|(k, s)| (k.clone(), format!("{s:.11e}").parse().expect("formatted float parses")))
            .collect();
        ScoreSet { system_id: self.system_id.clone(), scores }
    }
}

/// Parses a score file; systems are returned in order of first appearance.
pub fn parse_score_file(text: &str) -> Result<Vec<ScoreSet>> {
    let mut sets: Vec<ScoreSet> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |reason: String| Error::Parse { line: i + 1, reason };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(parse_err(format!("expected 4 columns, found {}", cols.len())));
        }
        let score: f64 = cols[3].parse().map_err(|_| parse_err(format!("bad score `{}`", cols[3])))?;
        let set = match sets.iter().position(|s| s.system_id == cols[0]) {
            Some(p) => &mut sets[p],
            None => {
                sets.push(ScoreSet::new(cols[0]));
                sets.last_mut().unwrap()
            }
        };
        if set.get(cols[1], cols[2]).is_some() {
            return Err(Error::Duplicate(format!("{}/{}/{}", cols[0], cols[1], cols[2])));
        }
        set.insert(cols[1], cols[2], score)?;
    }
    Ok(sets)
}

pub fn load_score_file(path: impl AsRef<Path>) -> Result<Vec<ScoreSet>> {
    let path = path.as_ref();
    parse_score_file(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}
