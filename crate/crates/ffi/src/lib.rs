//! C ABI over the `tdsv` toolkit.
//!
//! Every fallible call returns a [`TdsvStatus`]; on failure the message is
//! available from [`tdsv_last_error_message`] on the same thread. Models and
//! feature matrices are opaque handles released with their `_free` function.
//! Audio buffers are mono `double` samples; transforms write exactly `len`
//! samples to a caller-provided output buffer.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use tdsv::audio::Waveform;
use tdsv::augment::{self, VadMask, WowParams};
use tdsv::eval::{self, DcfParams, FusionMethod};
use tdsv::features::{extract_features, FeatureMatrix, FrontendConfig};
use tdsv::gmm::{self, DiagGmm, MapConfig};
use tdsv::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdsvStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ConfigError = 3,
    DataError = 4,
    NumericError = 5,
    IoError = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TdsvFusion {
    Average = 0,
    Minimum = 1,
    Maximum = 2,
    Median = 3,
}

/// Opaque diagonal GMM (UBM or speaker model).
pub struct TdsvGmm(DiagGmm);

/// Opaque feature matrix, row-major.
pub struct TdsvFeatures(FeatureMatrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TdsvStatus {
    match e {
        Error::Context { source, .. } => status_of(source),
        Error::Config(_) => TdsvStatus::ConfigError,
        Error::Numeric(_) => TdsvStatus::NumericError,
        Error::Io { .. } => TdsvStatus::IoError,
        Error::Domain(_) => TdsvStatus::InvalidArgument,
        _ => TdsvStatus::DataError,
    }
}

struct Fail(TdsvStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(TdsvStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any error or panic for `tdsv_last_error_message`.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TdsvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TdsvStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TdsvStatus::Panic
        }
    }
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize) -> Result<&'a mut [f64], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null("output buffer"));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null("output pointer"))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn wave(p: *const f64, len: usize, sample_rate: u32) -> Result<Waveform, Fail> {
    Ok(Waveform::new(input(p, len, "samples")?.to_vec(), sample_rate)?)
}

fn emit(result: &Waveform, out: &mut [f64]) {
    out.copy_from_slice(&result.samples);
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn tdsv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdsv_gmm_load(path: *const c_char, out: *mut *mut TdsvGmm) -> TdsvStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path).to_str().map_err(|_| Fail(TdsvStatus::InvalidArgument, "path is not UTF-8".into()))?;
        let g = gmm::load_gmm(path)?;
        *out_ptr(out)? = Box::into_raw(Box::new(TdsvGmm(g)));
        Ok(())
    })
}

/// Parses a model from its JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdsv_gmm_from_json(json: *const c_char, out: *mut *mut TdsvGmm) -> TdsvStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|_| Fail(TdsvStatus::InvalidArgument, "json is not UTF-8".into()))?;
        *out_ptr(out)? = Box::into_raw(Box::new(TdsvGmm(gmm::gmm_from_json(text)?)));
        Ok(())
    })
}

/// Serializes a model as JSON into a string released with [`tdsv_string_free`].
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdsv_gmm_to_json(model: *const TdsvGmm, out: *mut *mut c_char) -> TdsvStatus {
    guard(|| {
        let g = handle(model, "model")?;
        let s = CString::new(gmm::gmm_to_json(&g.0)).expect("json has no nul bytes");
        *out_ptr(out)? = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tdsv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `model` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tdsv_gmm_free(model: *mut TdsvGmm) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Component count, or 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tdsv_gmm_components(model: *const TdsvGmm) -> usize {
    model.as_ref().map_or(0, |g| g.0.n_components())
}

/// Feature dimension, or 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tdsv_gmm_dim(model: *const TdsvGmm) -> usize {
    model.as_ref().map_or(0, |g| g.0.dim())
}

/// Log-likelihood (nats) of one frame of `dim` values.
///
/// # Safety
/// `frame` must point to `dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdsv_gmm_log_likelihood(
    model: *const TdsvGmm,
    frame: *const f64,
    dim: usize,
    out: *mut f64,
) -> TdsvStatus {
    guard(|| {
        let g = handle(model, "model")?;
        *out_ptr(out)? = gmm::gmm_log_likelihood(&g.0, input(frame, dim, "frame")?)?;
        Ok(())
    })
}

/// Mean-only MAP adaptation of `ubm` toward `enrollment`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdsv_gmm_map_adapt(
    ubm: *const TdsvGmm,
    enrollment: *const TdsvFeatures,
    relevance: f64,
    iterations: usize,
    out: *mut *mut TdsvGmm,
) -> TdsvStatus {
    guard(|| {
        let cfg = MapConfig { relevance, iterations, ..MapConfig::default() };
        let g = gmm::map_adapt(&handle(ubm, "ubm")?.0, &handle(enrollment, "enrollment")?.0, &cfg)?;
        *out_ptr(out)? = Box::into_raw(Box::new(TdsvGmm(g)));
        Ok(())
    })
}

/// Frame-averaged log-likelihood ratio of `test` between `speaker` and `ubm`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdsv_llr_score(
    speaker: *const TdsvGmm,
    ubm: *const TdsvGmm,
    test: *const TdsvFeatures,
    out: *mut f64,
) -> TdsvStatus {
    guard(|| {
        *out_ptr(out)? = gmm::llr_score(&handle(speaker, "speaker")?.0, &handle(ubm, "ubm")?.0, &handle(test, "test")?.0)?;
        Ok(())
    })
}

/// Default front-end (57-dim MFCC, RASTA, deltas, VAD, CMVN) on a buffer.
///
/// # Safety
/// `samples` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdsv_features_extract(
    samples: *const f64,
    len: usize,
    sample_rate: u32,
    out: *mut *mut TdsvFeatures,
) -> TdsvStatus {
    guard(|| {
        let f = extract_features(&wave(samples, len, sample_rate)?, &FrontendConfig::default())?;
        *out_ptr(out)? = Box::into_raw(Box::new(TdsvFeatures(f)));
        Ok(())
    })
}

/// Wraps `rows * dims` row-major values as a feature handle.
///
/// # Safety
/// `data` must point to `rows * dims` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdsv_features_from_data(
    data: *const f64,
    rows: usize,
    dims: usize,
    out: *mut *mut TdsvFeatures,
) -> TdsvStatus {
    guard(|| {
        if dims == 0 {
            return Err(Fail(TdsvStatus::InvalidArgument, "dims must be positive".into()));
        }
        let n = rows.checked_mul(dims).ok_or_else(|| Fail(TdsvStatus::InvalidArgument, "size overflow".into()))?;
        let f = FeatureMatrix::new(dims, input(data, n, "data")?.to_vec(), Vec::new())?;
        *out_ptr(out)? = Box::into_raw(Box::new(TdsvFeatures(f)));
        Ok(())
    })
}

/// # Safety
/// `f` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tdsv_features_rows(f: *const TdsvFeatures) -> usize {
    f.as_ref().map_or(0, |f| f.0.n_rows())
}

/// # Safety
/// `f` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tdsv_features_dims(f: *const TdsvFeatures) -> usize {
    f.as_ref().map_or(0, |f| f.0.n_dims())
}

/// Row-major values, valid while the handle lives; NULL for NULL.
///
/// # Safety
/// `f` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tdsv_features_data(f: *const TdsvFeatures) -> *const f64 {
    f.as_ref().map_or(ptr::null(), |f| f.0.as_slice().as_ptr())
}

/// # Safety
/// `f` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tdsv_features_free(f: *mut TdsvFeatures) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Equal error rate in percent and its threshold.
///
/// # Safety
/// Arrays must hold the stated counts; outputs must be writable (threshold may be NULL).
#[no_mangle]
pub unsafe extern "C" fn tdsv_compute_eer(
    targets: *const f64,
    n_targets: usize,
    nontargets: *const f64,
    n_nontargets: usize,
    eer_percent: *mut f64,
    threshold: *mut f64,
) -> TdsvStatus {
    guard(|| {
        let e = eval::compute_eer(input(targets, n_targets, "targets")?, input(nontargets, n_nontargets, "nontargets")?)?;
        *out_ptr(eer_percent)? = e.percent;
        if let Some(t) = threshold.as_mut() {
            *t = e.threshold;
        }
        Ok(())
    })
}

/// Raw minimum detection cost and its threshold.
///
/// # Safety
/// Arrays must hold the stated counts; outputs must be writable (threshold may be NULL).
#[no_mangle]
pub unsafe extern "C" fn tdsv_compute_min_dcf(
    targets: *const f64,
    n_targets: usize,
    nontargets: *const f64,
    n_nontargets: usize,
    c_miss: f64,
    c_fa: f64,
    p_target: f64,
    min_dcf: *mut f64,
    threshold: *mut f64,
) -> TdsvStatus {
    guard(|| {
        let params = DcfParams { c_miss, c_fa, p_target };
        let d = eval::compute_min_dcf(
            input(targets, n_targets, "targets")?,
            input(nontargets, n_nontargets, "nontargets")?,
            &params,
        )?;
        *out_ptr(min_dcf)? = d.value;
        if let Some(t) = threshold.as_mut() {
            *t = d.threshold;
        }
        Ok(())
    })
}

/// Fuses one trial's per-system scores.
///
/// # Safety
/// `scores` must hold `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tdsv_fuse_scores(scores: *const f64, n: usize, method: TdsvFusion, out: *mut f64) -> TdsvStatus {
    guard(|| {
        let m = match method {
            TdsvFusion::Average => FusionMethod::Average,
            TdsvFusion::Minimum => FusionMethod::Minimum,
            TdsvFusion::Maximum => FusionMethod::Maximum,
            TdsvFusion::Median => FusionMethod::Median,
        };
        *out_ptr(out)? = eval::fuse_scores(input(scores, n, "scores")?, m)?;
        Ok(())
    })
}

/// # Safety
/// `samples` and `out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tdsv_pitch_shift(
    samples: *const f64,
    len: usize,
    sample_rate: u32,
    semitones: i32,
    out: *mut f64,
) -> TdsvStatus {
    guard(|| {
        let w = augment::pitch_shift(&wave(samples, len, sample_rate)?, semitones)?;
        emit(&w, output(out, len)?);
        Ok(())
    })
}

/// # Safety
/// `samples` and `out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tdsv_wow_resample(
    samples: *const f64,
    len: usize,
    sample_rate: u32,
    a: f64,
    f: f64,
    out: *mut f64,
) -> TdsvStatus {
    guard(|| {
        let w = augment::wow_resample(&wave(samples, len, sample_rate)?, WowParams { a, f })?;
        emit(&w, output(out, len)?);
        Ok(())
    })
}

/// # Safety
/// `samples` and `out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tdsv_harmonic_distort(
    samples: *const f64,
    len: usize,
    sample_rate: u32,
    depth: u32,
    out: *mut f64,
) -> TdsvStatus {
    guard(|| {
        let w = augment::harmonic_distort(&wave(samples, len, sample_rate)?, depth);
        emit(&w, output(out, len)?);
        Ok(())
    })
}

/// # Safety
/// `samples` and `out` hold `len` doubles; `ir` holds `ir_len`.
#[no_mangle]
pub unsafe extern "C" fn tdsv_apply_ir(
    samples: *const f64,
    len: usize,
    ir: *const f64,
    ir_len: usize,
    sample_rate: u32,
    out: *mut f64,
) -> TdsvStatus {
    guard(|| {
        let w = augment::apply_ir(&wave(samples, len, sample_rate)?, &wave(ir, ir_len, sample_rate)?)?;
        emit(&w, output(out, len)?);
        Ok(())
    })
}

/// # Safety
/// `samples` and `out` hold `len` doubles; `partner` holds `partner_len`.
#[no_mangle]
pub unsafe extern "C" fn tdsv_sound_mix(
    samples: *const f64,
    len: usize,
    partner: *const f64,
    partner_len: usize,
    sample_rate: u32,
    out: *mut f64,
) -> TdsvStatus {
    guard(|| {
        let w = augment::sound_mix(&wave(samples, len, sample_rate)?, &wave(partner, partner_len, sample_rate)?)?;
        emit(&w, output(out, len)?);
        Ok(())
    })
}

/// Adds looped noise at `snr_db`, with speech power gated by the default VAD.
///
/// # Safety
/// `samples` and `out` hold `len` doubles; `noise` holds `noise_len`.
#[no_mangle]
pub unsafe extern "C" fn tdsv_add_noise_snr(
    samples: *const f64,
    len: usize,
    noise: *const f64,
    noise_len: usize,
    sample_rate: u32,
    snr_db: f64,
    out: *mut f64,
) -> TdsvStatus {
    guard(|| {
        let speech = wave(samples, len, sample_rate)?;
        let vad = VadMask::from_waveform(&speech, &FrontendConfig::default())?;
        let w = augment::add_noise_snr(&speech, &wave(noise, noise_len, sample_rate)?, snr_db, &vad)?;
        emit(&w, output(out, len)?);
        Ok(())
    })
}
