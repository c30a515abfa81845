//! `.fmx` cache: text header `n_rows n_dims\n`, then little-endian f64 rows.

use std::fs;
use std::path::Path;

use super::FeatureMatrix;
use crate::error::{Error, Result};

pub fn write_fmx(features: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = format!("{} {}\n", features.n_rows(), features.n_dims()).into_bytes();
    out.reserve(features.as_slice().len() * 8);
    for v in features.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_fmx(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |reason: String| Error::Format { path: path.to_path_buf(), reason };
    let nl = bytes.iter().position(|&b| b == b'\n').ok_or_else(|| bad("missing header".into()))?;
    let header = std::str::from_utf8(&bytes[..nl]).map_err(|_| bad("header not UTF-8".into()))?;
    let mut parts = header.split_whitespace().map(str::parse::<usize>);
    let (rows, dims) = match (parts.next(), parts.next(), parts.next()) {
        (Some(Ok(r)), Some(Ok(d)), None) if d > 0 => (r, d),
        _ => return Err(bad(format!("bad header `{header}`"))),
    };
    let body = &bytes[nl + 1..];
    if body.len() != rows * dims * 8 {
        return Err(bad(format!("expected {} payload bytes, found {}", rows * dims * 8, body.len())));
    }
    let data = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    FeatureMatrix::new(dims, data, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.fmx");
        let data: Vec<f64> = (0..12).map(|i| (i as f64).sqrt() / 3.0 - 0.1).collect();
        let f = FeatureMatrix::new(4, data, Vec::new()).unwrap();
        write_fmx(&f, &p).unwrap();
        assert_eq!(read_fmx(&p).unwrap(), f);
        assert!(fs::read(&p).unwrap().starts_with(b"3 4\n"));
    }

    #[test]
    fn truncated_payload_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.fmx");
        fs::write(&p, b"2 2\n\0\0\0\0\0\0\0\0").unwrap();
        assert!(matches!(read_fmx(&p), Err(Error::Format { .. })));
    }
}
