//! C interface to `circlespec`.
//!
//! Objects are opaque handles created by `cs_*_new`/`cs_*_compute` and released
//! with the matching `cs_*_free`. Every fallible call returns a [`CsStatus`];
//! on failure, [`cs_last_error`] returns a message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use circlespec::rmt::ReferenceDistribution;
use circlespec::statistics::{delta_f, ks_distance, normalize_mean, EmpiricalCdf};
use circlespec::{Coverage, Error, ScanPolicy, Spectrum, SystemConfig, Topology};

pub const CS_TOPOLOGY_CIRCLE: i32 = 0;
pub const CS_TOPOLOGY_SEGMENT: i32 = 1;

pub const CS_REFERENCE_WIGNER: i32 = 0;
pub const CS_REFERENCE_GOE: i32 = 1;
pub const CS_REFERENCE_POISSON: i32 = 2;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Usage = 4,
    Completeness = 5,
    InsufficientData = 6,
    SelfCheck = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// A validated system: topology, coupling and interaction positions.
pub struct CsConfig(SystemConfig);

/// Computed roots, ascending, repeated per multiplicity.
pub struct CsSpectrum {
    roots: Vec<f64>,
    inner: Spectrum,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: CsStatus, message: impl Into<String>) -> CsStatus {
    set_error(message.into());
    status
}

fn status_of(error: &Error) -> CsStatus {
    match error {
        Error::Domain(_) => CsStatus::Domain,
        Error::Usage(_) => CsStatus::Usage,
        Error::Completeness { .. } => CsStatus::Completeness,
        Error::InsufficientData(_) => CsStatus::InsufficientData,
        Error::SelfCheck(_) => CsStatus::SelfCheck,
        Error::Config(_) | Error::Parse { .. } => CsStatus::InvalidArgument,
        Error::Io { .. } => CsStatus::Io,
    }
}

fn from_error(error: Error) -> CsStatus {
    fail(status_of(&error), error.to_string())
}

fn guard(body: impl FnOnce() -> CsStatus) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => {
            if status == CsStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            status
        }
        Err(_) => fail(CsStatus::Panic, "internal panic"),
    }
}

fn topology(code: i32) -> Result<Topology, CsStatus> {
    match code {
        CS_TOPOLOGY_CIRCLE => Ok(Topology::Circle),
        CS_TOPOLOGY_SEGMENT => Ok(Topology::Segment),
        other => Err(fail(CsStatus::InvalidArgument, format!("unknown topology code {other}"))),
    }
}

fn reference(code: i32) -> Result<ReferenceDistribution, CsStatus> {
    match code {
        CS_REFERENCE_WIGNER => Ok(ReferenceDistribution::Wigner),
        CS_REFERENCE_GOE => Ok(ReferenceDistribution::Goe),
        CS_REFERENCE_POISSON => Ok(ReferenceDistribution::Poisson),
        other => Err(fail(CsStatus::InvalidArgument, format!("unknown reference code {other}"))),
    }
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(CsStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn cs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a system with explicit positions `positions[0..n]`, strictly increasing in `(0, 2π)`.
///
/// # Safety
/// `positions` must point to `n` readable doubles (it may be null when `n == 0`);
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_config_new(
    topology_code: i32,
    alpha: f64,
    positions: *const f64,
    n: usize,
    out: *mut *mut CsConfig,
) -> CsStatus {
    guard(|| {
        non_null!(out);
        if n > 0 {
            non_null!(positions);
        }
        let t = try_status!(topology(topology_code));
        let x = if n == 0 { Vec::new() } else { std::slice::from_raw_parts(positions, n).to_vec() };
        match SystemConfig::new(t, alpha, x) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(CsConfig(c)));
                CsStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Creates a system with `n` interactions at the square-root-of-primes positions.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_config_new_primes(topology_code: i32, alpha: f64, n: usize, out: *mut *mut CsConfig) -> CsStatus {
    guard(|| {
        non_null!(out);
        let t = try_status!(topology(topology_code));
        match SystemConfig::with_prime_positions(t, alpha, n) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(CsConfig(c)));
                CsStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `config` must come from `cs_config_new*` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cs_config_free(config: *mut CsConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// `beta = (1 - α²)/(1 + α²)` of the system.
///
/// # Safety
/// `config` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_config_beta(config: *const CsConfig, out: *mut f64) -> CsStatus {
    guard(|| {
        non_null!(config, out);
        *out = (*config).0.beta();
        CsStatus::Ok
    })
}

/// Normalized secular function at `k` and the magnitude of the discarded imaginary part.
///
/// # Safety
/// `config` must be a live handle; `value` must be writable; `residual_imag` may be null.
#[no_mangle]
pub unsafe extern "C" fn cs_secular(config: *const CsConfig, k: f64, value: *mut f64, residual_imag: *mut f64) -> CsStatus {
    guard(|| {
        non_null!(config, value);
        let c = &(*config).0;
        let r = match c.topology() {
            Topology::Circle => circlespec::model::secular_circle(k, c),
            Topology::Segment => circlespec::model::secular_segment(k, c),
        };
        match r {
            Ok(v) => {
                *value = v.value;
                if !residual_imag.is_null() {
                    *residual_imag = v.residual_imag;
                }
                CsStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Computes the first `count` positive roots (with multiplicity).
///
/// # Safety
/// `config` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_spectrum_compute(config: *const CsConfig, count: usize, out: *mut *mut CsSpectrum) -> CsStatus {
    guard(|| {
        non_null!(config, out);
        let c = &(*config).0;
        match circlespec::find_spectrum(c, Coverage::Count(count), &ScanPolicy::for_config(c)) {
            Ok(s) => {
                *out = Box::into_raw(Box::new(CsSpectrum {
                    roots: s.roots(),
                    inner: s,
                }));
                CsStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `spectrum` must come from `cs_spectrum_compute` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cs_spectrum_free(spectrum: *mut CsSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Number of roots counted with multiplicity; 0 for null.
///
/// # Safety
/// `spectrum` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cs_spectrum_len(spectrum: *const CsSpectrum) -> usize {
    if spectrum.is_null() {
        0
    } else {
        (*spectrum).roots.len()
    }
}

/// Copies the roots into `buffer`, which must hold at least `cs_spectrum_len` values.
///
/// # Safety
/// `spectrum` must be a live handle and `buffer` must point to `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cs_spectrum_roots(spectrum: *const CsSpectrum, buffer: *mut f64, capacity: usize) -> CsStatus {
    guard(|| {
        non_null!(spectrum, buffer);
        let roots = &(*spectrum).roots;
        if capacity < roots.len() {
            return fail(
                CsStatus::BufferTooSmall,
                format!("buffer holds {capacity} values, {} needed", roots.len()),
            );
        }
        ptr::copy_nonoverlapping(roots.as_ptr(), buffer, roots.len());
        CsStatus::Ok
    })
}

/// Largest `|N(K) - 2K|` found by the solver's counting check.
///
/// # Safety
/// `spectrum` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_spectrum_count_deviation(spectrum: *const CsSpectrum, out: *mut u64) -> CsStatus {
    guard(|| {
        non_null!(spectrum, out);
        *out = (*spectrum).inner.diagnostics.count_check.max_deviation;
        CsStatus::Ok
    })
}

/// CDF of a reference spacing law (unit mean) at `s`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_reference_cdf(reference_code: i32, s: f64, out: *mut f64) -> CsStatus {
    guard(|| {
        non_null!(out);
        let r = try_status!(reference(reference_code));
        if s.is_nan() || s < 0.0 {
            return fail(CsStatus::Domain, format!("spacing must be non-negative, got {s}"));
        }
        *out = r.cdf(s);
        CsStatus::Ok
    })
}

unsafe fn normalized_ecdf(spacings: *const f64, n: usize) -> Result<EmpiricalCdf, CsStatus> {
    if spacings.is_null() {
        return Err(fail(CsStatus::NullPointer, "`spacings` is null"));
    }
    let sample = std::slice::from_raw_parts(spacings, n);
    normalize_mean(sample)
        .and_then(|v| EmpiricalCdf::new(&v))
        .map_err(from_error)
}

/// `∫ (F_N - F_ref)² ds` for `spacings[0..n]` rescaled to unit mean.
///
/// # Safety
/// `spacings` must point to `n` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_delta_f(spacings: *const f64, n: usize, reference_code: i32, out: *mut f64) -> CsStatus {
    guard(|| {
        non_null!(out);
        let r = try_status!(reference(reference_code));
        let ecdf = try_status!(normalized_ecdf(spacings, n));
        *out = delta_f(&ecdf, r);
        CsStatus::Ok
    })
}

/// Kolmogorov–Smirnov distance of `spacings[0..n]`, rescaled to unit mean, to a reference law.
///
/// # Safety
/// `spacings` must point to `n` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cs_ks_distance(spacings: *const f64, n: usize, reference_code: i32, out: *mut f64) -> CsStatus {
    guard(|| {
        non_null!(out);
        let r = try_status!(reference(reference_code));
        let ecdf = try_status!(normalized_ecdf(spacings, n));
        *out = ks_distance(&ecdf, |s| r.cdf(s));
        CsStatus::Ok
    })
}
