//! JSON model files: `k`, `d`, `weights`, row-major `means` and `variances`,
//! every number written with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::model::DiagGmm;
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GmmFile {
    k: usize,
    d: usize,
    weights: Vec<f64>,
    means: Vec<f64>,
    variances: Vec<f64>,
}

fn push_array(out: &mut String, name: &str, values: &[f64]) {
    write!(out, "  \"{name}\": [").unwrap();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write!(out, "{v:.16e}").unwrap();
    }
    out.push(']');
}

pub fn gmm_to_json(model: &DiagGmm) -> String {
    let mut out = String::new();
    writeln!(out, "{{\n  \"k\": {},\n  \"d\": {},", model.n_components(), model.dim()).unwrap();
    push_array(&mut out, "weights", model.weights());
    out.push_str(",\n");
    push_array(&mut out, "means", model.means());
    out.push_str(",\n");
    push_array(&mut out, "variances", model.variances());
    out.push_str("\n}\n");
    out
}

pub fn gmm_from_json(text: &str) -> Result<DiagGmm> {
    let file: GmmFile = serde_json::from_str(text).map_err(|e| Error::Format {
        path: Default::default(),
        reason: e.to_string(),
    })?;
    if file.k == 0 || file.d == 0 {
        return Err(Error::Validation(format!("k = {} and d = {} must both be positive", file.k, file.d)));
    }
    if file.weights.len() != file.k || file.means.len() != file.k * file.d {
        return Err(Error::Validation("array lengths disagree with k and d".into()));
    }
    DiagGmm::new(file.weights, file.means, file.variances)
}

pub fn save_gmm(model: &DiagGmm, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, gmm_to_json(model)).map_err(|e| Error::io(path, e))
}

pub fn load_gmm(path: impl AsRef<Path>) -> Result<DiagGmm> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    gmm_from_json(&text).map_err(|e| match e {
        Error::Format { reason, .. } => Error::Format { path: path.to_path_buf(), reason },
        other => other,
    })
}
