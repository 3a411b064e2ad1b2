//! C interface to `hartogs`.
//!
//! Series are opaque `HbSeries` handles owned by the caller and released with
//! [`hb_series_free`]. Every fallible call returns an [`HbStatus`]; the message
//! of the last failure on the calling thread is available from
//! [`hb_last_error_message`]. Text outputs use the caller-buffer protocol:
//! pass `buf = NULL` or a short `len` to learn the size through `needed`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hartogs::bergman::monomial_norm_sq;
use hartogs::exact::{exact_complex, Rational};
use hartogs::quadrature::{inner_product_exact, lp_norm, QuadratureSpec, TermSum, Verdict};
use hartogs::series::{BellDirection, MultiplierSeq};
use hartogs::verify::{run_scenario, Params};
use hartogs::{BiIndex, Domain, Error, ExactSeries, Point2C, Weight};
use num_bigint::BigInt;
use num_complex::Complex64;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Config = 4,
    /// Point outside the domain, a singular evaluation or a bad index.
    Domain = 5,
    Divergent = 6,
    Numeric = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HbDomain {
    Disc = 0,
    PuncturedDisc = 1,
    Bidisc = 2,
    PuncturedBidisc = 3,
    HartogsTriangle = 4,
}

impl From<HbDomain> for Domain {
    fn from(d: HbDomain) -> Domain {
        match d {
            HbDomain::Disc => Domain::Disc,
            HbDomain::PuncturedDisc => Domain::PuncturedDisc,
            HbDomain::Bidisc => Domain::Bidisc,
            HbDomain::PuncturedBidisc => Domain::PuncturedBidisc,
            HbDomain::HartogsTriangle => Domain::HartogsTriangle,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HbBellDirection {
    HartogsToBidisc = 0,
    BidiscToHartogs = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HbVerdict {
    Converged = 0,
    Diverged = 1,
    Inconclusive = 2,
}

/// Result of [`hb_lp_norm`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct HbNorm {
    pub value: f64,
    pub error_estimate: f64,
    pub verdict: HbVerdict,
    /// Slope of the truncated integral against ln(1/eps); NaN unless diverged.
    pub log_slope: f64,
    pub growth_exponent: f64,
}

/// Opaque series with exact rational complex coefficients.
pub struct HbSeries {
    inner: ExactSeries,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).unwrap_or_default());
}

fn status_of(e: &Error) -> HbStatus {
    match e {
        Error::InvalidArgument(_) => HbStatus::InvalidArgument,
        Error::Parse { .. } => HbStatus::Parse,
        Error::Config { .. } => HbStatus::Config,
        Error::DimensionMismatch { .. }
        | Error::SingularEvaluation(_)
        | Error::NonIntegrableIndex { .. }
        | Error::UnsupportedDomain { .. } => HbStatus::Domain,
        Error::DivergentIntegral { .. } | Error::DivergentSequence { .. } => HbStatus::Divergent,
        Error::Irrational(_) | Error::Internal(_) => HbStatus::Numeric,
        Error::Io(_) => HbStatus::Io,
    }
}

struct Fail(HbStatus);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        set_error(e.to_string());
        Fail(status_of(&e))
    }
}

fn null(what: &str) -> Fail {
    set_error(format!("{what} is NULL"));
    Fail(HbStatus::NullPointer)
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            HbStatus::Ok
        }
        Ok(Err(Fail(s))) => s,
        Err(_) => {
            set_error("panic inside hartogs");
            HbStatus::Panic
        }
    }
}

unsafe fn series_ref<'a>(s: *const HbSeries) -> Result<&'a ExactSeries, Fail> {
    s.as_ref().map(|s| &s.inner).ok_or_else(|| null("series"))
}

unsafe fn c_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"));
        Fail(HbStatus::InvalidArgument)
    })
}

unsafe fn emit(s: *mut *mut HbSeries, series: ExactSeries) -> Result<(), Fail> {
    if s.is_null() {
        return Err(null("out"));
    }
    *s = Box::into_raw(Box::new(HbSeries { inner: series }));
    Ok(())
}

unsafe fn write_text(
    text: &str,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> Result<(), Fail> {
    let bytes = text.as_bytes();
    if !needed.is_null() {
        *needed = bytes.len() + 1;
    }
    if buf.is_null() || len < bytes.len() + 1 {
        set_error(format!("buffer needs {} bytes", bytes.len() + 1));
        return Err(Fail(HbStatus::BufferTooSmall));
    }
    ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, bytes.len());
    *buf.add(bytes.len()) = 0;
    Ok(())
}

fn ratio(num: i64, den: i64) -> Result<Rational, Fail> {
    if den == 0 {
        set_error("zero denominator");
        return Err(Fail(HbStatus::InvalidArgument));
    }
    Ok(Rational::new(BigInt::from(num), BigInt::from(den)))
}

/// Message of the last failure on this thread; empty after a success.
/// The pointer stays valid until the next call into this library.
#[no_mangle]
pub extern "C" fn hb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Creates an empty series on `domain`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hb_series_new(domain: HbDomain, out: *mut *mut HbSeries) -> HbStatus {
    guard(|| emit(out, ExactSeries::new(domain.into())))
}

/// Releases a series. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn hb_series_free(s: *mut HbSeries) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Adds `(re_num/re_den) + i (im_num/im_den)` to the coefficient of `z1^m z2^n`.
///
/// # Safety
/// `s` must be a live series.
#[no_mangle]
pub unsafe extern "C" fn hb_series_add_term(
    s: *mut HbSeries,
    m: i64,
    n: i64,
    re_num: i64,
    re_den: i64,
    im_num: i64,
    im_den: i64,
) -> HbStatus {
    guard(|| {
        let s = s.as_mut().ok_or_else(|| null("series"))?;
        let c = exact_complex(ratio(re_num, re_den)?, ratio(im_num, im_den)?);
        s.inner.add_term(BiIndex::new(m, n), c)?;
        Ok(())
    })
}

/// Number of stored nonzero coefficients, or 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live series.
#[no_mangle]
pub unsafe extern "C" fn hb_series_len(s: *const HbSeries) -> usize {
    s.as_ref().map_or(0, |s| s.inner.len())
}

/// Parses the text form written by [`hb_series_to_text`].
///
/// # Safety
/// `text` must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn hb_series_parse(text: *const c_char, out: *mut *mut HbSeries) -> HbStatus {
    guard(|| {
        let t = c_str(text, "text")?;
        emit(out, ExactSeries::from_text(t)?)
    })
}

/// Writes the text form into `buf`.
///
/// # Safety
/// `buf` must hold `len` bytes or be NULL; `needed` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn hb_series_to_text(
    s: *const HbSeries,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> HbStatus {
    guard(|| write_text(&series_ref(s)?.to_text(), buf, len, needed))
}

/// Evaluates at `(z1, z2)`; `z2` is ignored on one-variable domains.
///
/// # Safety
/// `s` must be a live series and `re`, `im` valid.
#[no_mangle]
pub unsafe extern "C" fn hb_series_eval(
    s: *const HbSeries,
    z1_re: f64,
    z1_im: f64,
    z2_re: f64,
    z2_im: f64,
    re: *mut f64,
    im: *mut f64,
) -> HbStatus {
    guard(|| {
        let s = series_ref(s)?;
        if re.is_null() || im.is_null() {
            return Err(null("output"));
        }
        let z2 = (s.domain().dim() == 2).then(|| Complex64::new(z2_re, z2_im));
        let v = s.eval(&Point2C::from_rect(Complex64::new(z1_re, z1_im), z2))?;
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// Bell transform between the Hartogs triangle and the punctured bidisc.
///
/// # Safety
/// `s` must be a live series and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn hb_series_bell_transform(
    s: *const HbSeries,
    direction: HbBellDirection,
    out: *mut *mut HbSeries,
) -> HbStatus {
    guard(|| {
        let dir = match direction {
            HbBellDirection::HartogsToBidisc => BellDirection::HartogsToBidisc,
            HbBellDirection::BidiscToHartogs => BellDirection::BidiscToHartogs,
        };
        emit(out, series_ref(s)?.bell_transform(dir)?)
    })
}

/// Keeps the terms with first-variable degree at most `n_max`.
///
/// # Safety
/// `s` must be a live series and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn hb_series_partial_sum(
    s: *const HbSeries,
    n_max: u64,
    out: *mut *mut HbSeries,
) -> HbStatus {
    guard(|| emit(out, series_ref(s)?.partial_sum(n_max)?))
}

/// Multiplies the coefficient of `w1^mu w2^nu` by `1 + 1/(mu + 1)`.
///
/// # Safety
/// `s` must be a live series and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn hb_series_apply_t(
    s: *const HbSeries,
    out: *mut *mut HbSeries,
) -> HbStatus {
    guard(|| {
        emit(
            out,
            series_ref(s)?.apply_multiplier(&MultiplierSeq::one_plus_reciprocal())?,
        )
    })
}

/// Exact squared L2 norm on the series' domain, as a double.
///
/// # Safety
/// `s` must be a live series and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn hb_series_l2_norm_sq(s: *const HbSeries, out: *mut f64) -> HbStatus {
    guard(|| {
        let s = series_ref(s)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let f = TermSum::from_series(s)?;
        *out = inner_product_exact(&f, &f, s.domain())?.to_f64();
        Ok(())
    })
}

/// Squared norm of `z1^m z2^n` as `num/den * pi^pi_power`. Fails with
/// `INVALID_ARGUMENT` when numerator or denominator exceed 64 bits.
///
/// # Safety
/// The outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn hb_monomial_norm_sq(
    domain: HbDomain,
    m: i64,
    n: i64,
    num: *mut i64,
    den: *mut i64,
    pi_power: *mut u32,
) -> HbStatus {
    guard(|| {
        if num.is_null() || den.is_null() || pi_power.is_null() {
            return Err(null("output"));
        }
        let v = monomial_norm_sq(domain.into(), BiIndex::new(m, n))?;
        let r = &v.coeff.re;
        let (Ok(a), Ok(b)) = (i64::try_from(r.numer()), i64::try_from(r.denom())) else {
            set_error("norm does not fit in 64 bits");
            return Err(Fail(HbStatus::InvalidArgument));
        };
        *num = a;
        *den = b;
        *pi_power = v.pi_power;
        Ok(())
    })
}

/// `(int |f|^p |z1|^gamma dV)^(1/p)` with adaptive quadrature. A divergent
/// integral is reported through `out->verdict`, not the status.
///
/// # Safety
/// `s` must be a live series and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn hb_lp_norm(
    s: *const HbSeries,
    p: f64,
    gamma: f64,
    tol: f64,
    out: *mut HbNorm,
) -> HbStatus {
    guard(|| {
        let s = series_ref(s)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let f = TermSum::from_series(s)?;
        let r = lp_norm(
            &f,
            p,
            s.domain(),
            &Weight::PowerDelta1(gamma),
            &QuadratureSpec::default(),
            tol,
        )?;
        let (verdict, log_slope, growth_exponent) = match r.verdict {
            Verdict::Converged => (HbVerdict::Converged, f64::NAN, f64::NAN),
            Verdict::Diverged {
                log_slope,
                growth_exponent,
            } => (HbVerdict::Diverged, log_slope, growth_exponent),
            Verdict::Inconclusive => (HbVerdict::Inconclusive, f64::NAN, f64::NAN),
        };
        *out = HbNorm {
            value: r.value.re,
            error_estimate: r.error_estimate,
            verdict,
            log_slope,
            growth_exponent,
        };
        Ok(())
    })
}

/// Runs a verification scenario and writes its JSON report.
/// `params_json` is NULL or a JSON object of scenario parameters.
/// `*passed` is set to 0 for a failing verdict and 1 otherwise.
///
/// # Safety
/// Strings must be NUL-terminated; `buf` must hold `len` bytes or be NULL;
/// `needed` and `passed` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn hb_verify_run(
    id: *const c_char,
    params_json: *const c_char,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
    passed: *mut i32,
) -> HbStatus {
    guard(|| {
        let id = c_str(id, "id")?;
        let params: Params = if params_json.is_null() {
            Params::default()
        } else {
            serde_json::from_str(c_str(params_json, "params_json")?).map_err(|e| {
                set_error(format!("params_json: {e}"));
                Fail(HbStatus::Config)
            })?
        };
        let report = run_scenario(id, &params, false)?;
        if !passed.is_null() {
            *passed = i32::from(report.verdict != hartogs::verify::ReportVerdict::Fail);
        }
        let text = serde_json::to_string_pretty(&report).map_err(|e| {
            set_error(e.to_string());
            Fail(HbStatus::Numeric)
        })?;
        write_text(&text, buf, len, needed)
    })
}
