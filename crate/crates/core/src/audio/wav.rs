use std::fs;
use std::path::Path;

use super::Waveform;
use crate::error::{Error, Result};

const PCM: u16 = 1;

/// Reads a 16-bit PCM mono RIFF/WAVE file; samples are scaled by 1/32768.
pub fn read_wav(path: impl AsRef<Path>) -> Result<Waveform> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_wav(&bytes, path)
}

fn parse_wav(bytes: &[u8], path: &Path) -> Result<Waveform> {
    let malformed = |reason: &str| Error::Format { path: path.to_path_buf(), reason: reason.into() };
    let unsupported =
        |reason: String| Error::Unsupported { path: path.to_path_buf(), reason };

    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(malformed("missing RIFF/WAVE header"));
    }

    let mut pos = 12;
    let mut format: Option<(u16, u16, u32, u16)> = None;
    let mut data: Option<&[u8]> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .filter(|&end| end <= bytes.len())
            .ok_or_else(|| malformed("chunk overruns file"))?;
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(malformed("fmt chunk too short"));
                }
                let tag = u16::from_le_bytes([body[0], body[1]]);
                let channels = u16::from_le_bytes([body[2], body[3]]);
                let rate = u32::from_le_bytes(body[4..8].try_into().unwrap());
                let bits = u16::from_le_bytes([body[14], body[15]]);
                format = Some((tag, channels, rate, bits));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // chunks are word aligned
        pos = body_end + (size & 1);
    }

    let (tag, channels, rate, bits) = format.ok_or_else(|| malformed("no fmt chunk"))?;
    if tag != PCM {
        return Err(unsupported(format!("format tag {tag} is not PCM")));
    }
    if channels != 1 {
        return Err(unsupported(format!("{channels} channels, expected mono")));
    }
    if bits != 16 {
        return Err(unsupported(format!("{bits}-bit samples, expected 16-bit")));
    }
    if rate == 0 {
        return Err(malformed("zero sample rate"));
    }
    let data = data.ok_or_else(|| malformed("no data chunk"))?;
    if data.len() % 2 != 0 {
        return Err(malformed("odd data chunk length"));
    }
    let samples = data
        .chunks_exact(2)
        .map(|b| i16::from_le_bytes([b[0], b[1]]) as f64 / 32768.0)
        .collect();
    Ok(Waveform { samples, sample_rate: rate })
}

fn quantize(sample: f64) -> i16 {
    let clipped = sample.clamp(-1.0, 1.0);
    // f64::round is half-away-from-zero
    (clipped * 32768.0).round().clamp(-32768.0, 32767.0) as i16
}

/// Serializes to a canonical 44-byte-header PCM16 mono WAV image.
pub fn wav_bytes(wave: &Waveform) -> Vec<u8> {
    let data_len = (wave.samples.len() * 2) as u32;
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&wave.sample_rate.to_le_bytes());
    out.extend_from_slice(&(wave.sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in &wave.samples {
        out.extend_from_slice(&quantize(s).to_le_bytes());
    }
    out
}

/// Writes PCM16 mono; out-of-range samples are hard-clipped.
pub fn write_wav(wave: &Waveform, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(i) = wave.samples.iter().position(|s| !s.is_finite()) {
        return Err(Error::Numeric(format!("non-finite sample at index {i}")));
    }
    fs::write(path, wav_bytes(wave)).map_err(|e| Error::io(path, e))
}
