use std::fmt::Write as _;

use super::metrics::{compute_eer, compute_min_dcf, DcfParams};
use super::trials::{ScoreSet, TrialList, TrialType};
use crate::error::{Error, Result};

/// Report columns, in order.
pub const NONTARGET_TYPES: [TrialType; 3] =
    [TrialType::TargetWrong, TrialType::ImposterCorrect, TrialType::ImposterWrong];

#[derive(Debug, Clone, PartialEq)]
pub struct TypeResult {
    pub kind: TrialType,
    pub eer_percent: f64,
    pub min_dcf: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub genuine_trials: usize,
    pub per_type: Vec<TypeResult>,
    /// Unweighted mean over the three non-target types.
    pub average_eer: f64,
    pub average_min_dcf: f64,
}

impl EvalReport {
    pub fn result(&self, kind: TrialType) -> Option<&TypeResult> {
        self.per_type.iter().find(|r| r.kind == kind)
    }
}

fn cell(eer_percent: f64, min_dcf: f64) -> String {
    format!("{eer_percent:.2}/{:.2}", 100.0 * min_dcf)
}

/// Genuine trials against each non-target type separately.
pub fn evaluate_trials(trials: &TrialList, scores: &ScoreSet, params: &DcfParams) -> Result<EvalReport> {
    params.validate()?;
    let mut by_type: [Vec<f64>; 4] = Default::default();
    let mut missing = Vec::new();
    for t in &trials.trials {
        match scores.get(&t.model_id, &t.utterance_id) {
            Some(s) => by_type[t.kind as usize].push(s),
            None => missing.push(format!("{}/{}", t.model_id, t.utterance_id)),
        }
    }
    if !missing.is_empty() {
        return Err(Error::Incomplete { missing });
    }
    let genuine = &by_type[TrialType::Genuine as usize];
    let mut per_type = Vec::with_capacity(3);
    for kind in NONTARGET_TYPES {
        let non = &by_type[kind as usize];
        let eer = compute_eer(genuine, non).map_err(|e| e.context(format!("{kind} trials")))?;
        let dcf = compute_min_dcf(genuine, non, params)?;
        per_type.push(TypeResult { kind, eer_percent: eer.percent, min_dcf: dcf.value, trials: non.len() });
    }
    let average_eer = per_type.iter().map(|r| r.eer_percent).sum::<f64>() / 3.0;
    let average_min_dcf = per_type.iter().map(|r| r.min_dcf).sum::<f64>() / 3.0;
    Ok(EvalReport { genuine_trials: genuine.len(), per_type, average_eer, average_min_dcf })
}

/// Rows of `EER%/MinDCFx100` cells for a group of systems under one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    pub title: String,
    pub dcf: DcfParams,
    pub rows: Vec<(String, EvalReport)>,
}

impl ReportTable {
    pub fn new(title: impl Into<String>, dcf: DcfParams) -> Self {
        Self { title: title.into(), dcf, rows: Vec::new() }
    }

    pub fn push(&mut self, label: impl Into<String>, report: EvalReport) {
        self.rows.push((label.into(), report));
    }

    pub fn get(&self, label: &str) -> Option<&EvalReport> {
        self.rows.iter().find(|(l, _)| l == label).map(|(_, r)| r)
    }

    fn header_note(&self) -> String {
        format!(
            "MinDCF is the raw (unnormalized) cost x100 with c_miss={} c_fa={} p_target={}",
            self.dcf.c_miss, self.dcf.c_fa, self.dcf.p_target
        )
    }

    fn cells(report: &EvalReport) -> Vec<String> {
        let mut cells: Vec<String> = NONTARGET_TYPES
            .iter()
            .map(|&k| {
                let r = report.result(k).expect("all non-target types evaluated");
                cell(r.eer_percent, r.min_dcf)
            })
            .collect();
        cells.push(cell(report.average_eer, report.average_min_dcf));
        cells
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("# {}\n# {}\n", self.title, self.header_note());
        out.push_str("system\ttarget-wrong\timposter-correct\timposter-wrong\taverage\n");
        for (label, report) in &self.rows {
            writeln!(out, "{label}\t{}", Self::cells(report).join("\t")).unwrap();
        }
        out
    }

    pub fn to_text(&self) -> String {
        let headers = ["system", "target-wrong", "imposter-correct", "imposter-wrong", "average"];
        let body: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|(label, r)| std::iter::once(label.clone()).chain(Self::cells(r)).collect())
            .collect();
        let widths: Vec<usize> = (0..headers.len())
            .map(|c| body.iter().map(|r| r[c].len()).chain([headers[c].len()]).max().unwrap())
            .collect();
        let line = |cols: &[&str]| {
            cols.iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut out = format!("{}\n{}\n", self.title, self.header_note());
        out.push_str(&line(&headers));
        out.push('\n');
        out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
        out.push('\n');
        for row in &body {
            let cols: Vec<&str> = row.iter().map(String::as_str).collect();
            out.push_str(&line(&cols));
            out.push('\n');
        }
        out
    }
}
