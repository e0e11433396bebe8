//! C interface to `spinbath-core`.
//!
//! Every function returns an [`SbStatus`]; results go through out-pointers.
//! On failure the message is kept per thread and can be read back with
//! [`sb_last_error_message`]. Panics are caught at the boundary and reported
//! as [`SbStatus::Panic`].
//!
//! Environments are passed around as opaque [`SbEnsemble`] handles that the
//! caller releases with [`sb_ensemble_free`].

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use spinbath_core::experiments::{fit_decoherence_time, series_sigma_nd, Decomposition, SigmaConfig, TimeSeries};
use spinbath_core::kernels::{kernel_k, r2_log_series_streaming, r2_log_of_t};
use spinbath_core::model::{make_random_ensemble, CouplingMode, EnvironmentEnsemble, TimeGrid};
use spinbath_core::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnsupportedSize = 3,
    InsufficientData = 4,
    BufferTooSmall = 5,
    Io = 6,
    Panic = 7,
}

/// How couplings are assigned when an ensemble is drawn.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbCoupling {
    /// Every particle gets the same `g`.
    Constant = 0,
    /// `g_j` uniform in `[0, g]`.
    Uniform = 1,
}

/// Which non-diagonal part to simulate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbDecomposition {
    OriginalD1 = 0,
    OriginalD2 = 1,
    GeneralD1 = 2,
    GeneralD2 = 3,
}

/// Result of an exponential decay fit.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SbDecayFit {
    pub tau: f64,
    pub intercept: f64,
    pub first: usize,
    pub last: usize,
    pub samples: usize,
    pub residual: f64,
}

/// Opaque environment handle.
pub struct SbEnsemble {
    inner: EnvironmentEnsemble,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: SbStatus, msg: impl Into<String>) -> SbStatus {
    set_error(msg.into());
    status
}

fn status_of(err: &Error) -> SbStatus {
    match err {
        Error::InvalidArgument(_) | Error::Usage(_) | Error::Parse { .. } => SbStatus::InvalidArgument,
        Error::UnsupportedSize(_) => SbStatus::UnsupportedSize,
        Error::InsufficientData(_) => SbStatus::InsufficientData,
        Error::Io { .. } => SbStatus::Io,
    }
}

/// Runs `f`, mapping errors and panics to a status and recording the message.
fn guard(f: impl FnOnce() -> Result<(), SbStatusError>) -> SbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            SbStatus::Ok
        }
        Ok(Err(SbStatusError(status, msg))) => fail(status, msg),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            fail(SbStatus::Panic, format!("panic: {msg}"))
        }
    }
}

struct SbStatusError(SbStatus, String);

impl From<Error> for SbStatusError {
    fn from(e: Error) -> Self {
        SbStatusError(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> SbStatusError {
    SbStatusError(SbStatus::NullPointer, format!("{what} is null"))
}

/// Borrows `len` elements, allowing a null pointer when `len == 0`.
unsafe fn input<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], SbStatusError> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn output<'a, T>(ptr: *mut T, len: usize, what: &str) -> Result<&'a mut [T], SbStatusError> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(ptr, len))
}

fn coupling(kind: SbCoupling, g: f64) -> CouplingMode {
    match kind {
        SbCoupling::Constant => CouplingMode::Constant(g),
        SbCoupling::Uniform => CouplingMode::UniformRandom(g),
    }
}

/// Version string of the library, NUL-terminated and static.
#[no_mangle]
pub extern "C" fn sb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length without the NUL, so a
/// caller can size a buffer by passing `cap = 0`.
///
/// # Safety
/// `buf` must be valid for `cap` bytes or null with `cap == 0`.
#[no_mangle]
pub unsafe extern "C" fn sb_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Draws `n` environment particles from `seed`.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle owned by the
/// caller.
#[no_mangle]
pub unsafe extern "C" fn sb_ensemble_new_random(
    n: usize,
    seed: u64,
    kind: SbCoupling,
    g: f64,
    out: *mut *mut SbEnsemble,
) -> SbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = make_random_ensemble(n, seed, coupling(kind, g))?;
        *out = Box::into_raw(Box::new(SbEnsemble { inner }));
        Ok(())
    })
}

/// Builds an ensemble from spin-up probabilities and couplings, both of
/// length `n`. Amplitudes are taken real and non-negative.
///
/// # Safety
/// `p_up` and `g` must be valid for `n` reads; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sb_ensemble_from_probabilities(
    p_up: *const f64,
    g: *const f64,
    n: usize,
    out: *mut *mut SbEnsemble,
) -> SbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = input(p_up, n, "p_up")?;
        let g = input(g, n, "g")?;
        let inner = EnvironmentEnsemble::from_probabilities(p, g.to_vec())?;
        *out = Box::into_raw(Box::new(SbEnsemble { inner }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `ens` must come from one of the constructors and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sb_ensemble_free(ens: *mut SbEnsemble) {
    if !ens.is_null() {
        drop(Box::from_raw(ens));
    }
}

/// Number of environment particles, or 0 for a null handle.
///
/// # Safety
/// `ens` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sb_ensemble_len(ens: *const SbEnsemble) -> usize {
    ens.as_ref().map_or(0, |e| e.inner.n())
}

/// `K_m(t)` in log-polar form: `ln|K_m|` and its phase in `(-π, π]`.
///
/// # Safety
/// `ens` must be a live handle; the out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sb_kernel_k(
    ens: *const SbEnsemble,
    m: i64,
    t: f64,
    out_log_mag: *mut f64,
    out_phase: *mut f64,
) -> SbStatus {
    guard(|| {
        let ens = ens.as_ref().ok_or_else(|| null("ens"))?;
        if out_log_mag.is_null() || out_phase.is_null() {
            return Err(null("out"));
        }
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("time must be finite, got {t}")).into());
        }
        let k = kernel_k(m, &ens.inner, t);
        *out_log_mag = k.log_mag();
        *out_phase = k.phase();
        Ok(())
    })
}

/// `ln r²(t)` at each of `len` times.
///
/// # Safety
/// `times` and `out` must be valid for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn sb_r2_log_series(
    ens: *const SbEnsemble,
    times: *const f64,
    len: usize,
    out: *mut f64,
) -> SbStatus {
    guard(|| {
        let ens = ens.as_ref().ok_or_else(|| null("ens"))?;
        let times = input(times, len, "times")?;
        let out = output(out, len, "out")?;
        for (o, &t) in out.iter_mut().zip(times) {
            *o = r2_log_of_t(&ens.inner, t);
        }
        Ok(())
    })
}

/// `ln r²(t)` for a freshly drawn environment of size `n`, without keeping the
/// particles in memory. Matches drawing the ensemble with the same seed.
///
/// # Safety
/// `times` and `out` must be valid for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn sb_r2_log_series_streaming(
    n: usize,
    seed: u64,
    kind: SbCoupling,
    g: f64,
    times: *const f64,
    len: usize,
    out: *mut f64,
) -> SbStatus {
    guard(|| {
        let times = input(times, len, "times")?;
        let out = output(out, len, "out")?;
        let logs = r2_log_series_streaming(n, seed, coupling(kind, g), times)?;
        out.copy_from_slice(&logs);
        Ok(())
    })
}

/// Normalized non-diagonal part on the grid `t_k = k·t0/intervals`,
/// `k = 0..=intervals`. `out` must hold `intervals + 1` values.
///
/// # Safety
/// `out` must be valid for `out_len` elements.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn sb_sigma_nd_series(
    decomposition: SbDecomposition,
    m: usize,
    n: usize,
    seed: u64,
    kind: SbCoupling,
    g: f64,
    t0: f64,
    intervals: usize,
    out: *mut f64,
    out_len: usize,
) -> SbStatus {
    guard(|| {
        let grid = TimeGrid::new(t0, intervals)?;
        if out_len < grid.len() {
            return Err(SbStatusError(
                SbStatus::BufferTooSmall,
                format!("need {} values, buffer holds {out_len}", grid.len()),
            ));
        }
        let out = output(out, grid.len(), "out")?;
        let decomposition = match decomposition {
            SbDecomposition::OriginalD1 => Decomposition::OriginalD1,
            SbDecomposition::OriginalD2 => Decomposition::OriginalD2,
            SbDecomposition::GeneralD1 => Decomposition::GeneralD1,
            SbDecomposition::GeneralD2 => Decomposition::GeneralD2,
        };
        let cfg = SigmaConfig { decomposition, m, n, seed, coupling: coupling(kind, g) };
        let series = series_sigma_nd(&cfg, &grid)?;
        out.copy_from_slice(&series.values);
        Ok(())
    })
}

/// Fits `v(t) ≈ e^{b} e^{-t/τ}` to samples with `v ∈ [e⁻⁶, 0.9]`.
///
/// # Safety
/// `times` and `values` must be valid for `len` elements; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sb_fit_decoherence_time(
    times: *const f64,
    values: *const f64,
    len: usize,
    out: *mut SbDecayFit,
) -> SbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let times = input(times, len, "times")?;
        let values = input(values, len, "values")?;
        let series = TimeSeries::new("fit", times.to_vec(), values.to_vec())?;
        let fit = fit_decoherence_time(&series)?;
        *out = SbDecayFit {
            tau: fit.tau,
            intercept: fit.intercept,
            first: *fit.window.start(),
            last: *fit.window.end(),
            samples: fit.samples,
            residual: fit.residual,
        };
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_message_roundtrip_and_truncation() {
        set_error("abcdef".into());
        let mut buf = [0 as c_char; 4];
        let len = unsafe { sb_last_error_message(buf.as_mut_ptr(), buf.len()) };
        assert_eq!(len, 6);
        assert_eq!(buf.map(|c| c as u8), *b"abc\0");
        assert_eq!(unsafe { sb_last_error_message(std::ptr::null_mut(), 0) }, 6);
    }

    #[test]
    fn panics_become_status() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, SbStatus::Panic);
        let mut buf = [0 as c_char; 32];
        unsafe { sb_last_error_message(buf.as_mut_ptr(), buf.len()) };
        let msg = unsafe { std::ffi::CStr::from_ptr(buf.as_ptr()) };
        assert_eq!(msg.to_str().unwrap(), "panic: boom");
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { std::ffi::CStr::from_ptr(sb_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
