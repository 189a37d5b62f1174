//! C ABI for `qwsearch`.
//!
//! Every fallible call returns a [`QwsStatus`] and writes its result through
//! an out pointer. On failure a description is kept per thread and read with
//! [`qws_last_error`]. Objects with internal state are handed out as opaque
//! pointers that must be released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qwsearch::evolve::{self, EvolutionTrace, PeakSearch, SuccessCurve};
use qwsearch::fullspace;
use qwsearch::graph::{self, WeightedGraph};
use qwsearch::perturbation::{self, medium_eigensystem, medium_runtime, RegimeTag, Thresholds};
use qwsearch::reduced::critical_gamma;
use qwsearch::Error;

/// Result of a call. Values other than `Ok` match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QwsStatus {
    Ok = 0,
    InvalidArgument = 2,
    SizeLimit = 3,
    NoMaximum = 4,
    RootNotFound = 5,
    Io = 6,
    /// A required pointer argument was null.
    NullPointer = 7,
    /// The library panicked.
    Internal = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QwsRegime {
    Small = 0,
    Medium = 1,
    Large = 2,
    Xl = 3,
    Xxl = 4,
}

impl From<RegimeTag> for QwsRegime {
    fn from(tag: RegimeTag) -> Self {
        match tag {
            RegimeTag::Small => QwsRegime::Small,
            RegimeTag::Medium => QwsRegime::Medium,
            RegimeTag::Large => QwsRegime::Large,
            RegimeTag::XL => QwsRegime::Xl,
            RegimeTag::XXL => QwsRegime::Xxl,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QwsPeak {
    pub t: f64,
    pub p: f64,
}

/// Analytic prediction for one instance. The final state is given in the
/// `(a, b, c, d)` basis.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QwsPrediction {
    pub regime: QwsRegime,
    pub k: f64,
    pub r: f64,
    pub gamma_c: f64,
    pub t_star: f64,
    pub p_star: f64,
    pub p_effective: f64,
    pub expected_runtime: f64,
    pub state_re: [f64; 4],
    pub state_im: [f64; 4],
    /// When set, the amplitude on `a` is only known up to a phase.
    pub phase_unspecified: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QwsMediumEigensystem {
    pub k: f64,
    pub lambdas: [f64; 3],
    pub alphas: [f64; 3],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QwsMediumRuntime {
    /// First positive root of the runtime equation, before rescaling.
    pub root: f64,
    pub t_star: f64,
    pub p_star: f64,
}

/// Opaque weighted graph.
pub struct QwsGraph(WeightedGraph);

/// Opaque success-probability curve of one instance.
pub struct QwsCurve(SuccessCurve);

/// Opaque sampled trace.
pub struct QwsTrace(EvolutionTrace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    // interior NULs cannot cross the boundary
    let message = CString::new(message.replace('\0', " ")).expect("NULs were removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn status_of(e: &Error) -> QwsStatus {
    match e {
        Error::InvalidArgument(_) => QwsStatus::InvalidArgument,
        Error::SizeLimit { .. } => QwsStatus::SizeLimit,
        Error::NoMaximum { .. } => QwsStatus::NoMaximum,
        Error::RootNotFound { .. } => QwsStatus::RootNotFound,
        Error::Io(_) | Error::Json(_) => QwsStatus::Io,
    }
}

/// Runs `f`, storing its value in `out` and turning errors and panics into a
/// status.
fn guard<T>(out: *mut T, f: impl FnOnce() -> qwsearch::Result<T>) -> QwsStatus {
    if out.is_null() {
        set_error("output pointer is null".into());
        return QwsStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(value)) => {
            // SAFETY: checked non-null above; the caller guarantees it is
            // valid for writes of T
            unsafe { out.write(value) };
            QwsStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal error: the library panicked".into());
            QwsStatus::Internal
        }
    }
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Null-safe shared borrow of a handle.
///
/// # Safety
/// `p` must be null or a live handle from this library.
unsafe fn handle<'a, T>(p: *const T) -> Option<&'a T> {
    p.as_ref()
}

macro_rules! require {
    ($h:expr) => {
        match $h {
            Some(h) => h,
            None => {
                set_error("handle is null".into());
                return QwsStatus::NullPointer;
            }
        }
    };
}

/// Message for the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qws_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qws_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version contains a NUL"),
    };
    VERSION.as_ptr()
}

/// `(M + w) / (M (M + 2w))`.
#[no_mangle]
pub extern "C" fn qws_critical_gamma(m: usize, w: f64) -> f64 {
    critical_gamma(m, w)
}

/// # Safety
/// `out` must be null or valid for a write of `QwsRegime`.
#[no_mangle]
pub unsafe extern "C" fn qws_classify(m: usize, w: f64, out: *mut QwsRegime) -> QwsStatus {
    guard(out, || Ok(perturbation::classify(m, w, &Thresholds::default())?.tag.into()))
}

/// # Safety
/// `out` must be null or valid for a write of `QwsPrediction`.
#[no_mangle]
pub unsafe extern "C" fn qws_predict(m: usize, w: f64, out: *mut QwsPrediction) -> QwsStatus {
    guard(out, || {
        let p = perturbation::predict(m, w, &Thresholds::default())?;
        let amps = p.final_state.state.amplitudes;
        Ok(QwsPrediction {
            regime: p.regime.tag.into(),
            k: p.regime.k,
            r: p.regime.r,
            gamma_c: p.gamma_c,
            t_star: p.t_star,
            p_star: p.p_star,
            p_effective: p.p_effective,
            expected_runtime: p.expected_runtime,
            state_re: amps.map(|z| z.re),
            state_im: amps.map(|z| z.im),
            phase_unspecified: p.final_state.phase_unspecified,
        })
    })
}

/// Highest point of the first peak of `p_a`, searched over the default
/// window `[0, 3π√M]`.
///
/// # Safety
/// `out` must be null or valid for a write of `QwsPeak`.
#[no_mangle]
pub unsafe extern "C" fn qws_first_maximum(m: usize, w: f64, gamma: f64, out: *mut QwsPeak) -> QwsStatus {
    guard(out, || {
        let peak = evolve::first_maximum_with(m, w, gamma, PeakSearch::for_m(m))?;
        Ok(QwsPeak { t: peak.t, p: peak.p })
    })
}

/// # Safety
/// `out` must be null or valid for a write of `QwsMediumEigensystem`.
#[no_mangle]
pub unsafe extern "C" fn qws_medium_eigensystem(k: f64, out: *mut QwsMediumEigensystem) -> QwsStatus {
    guard(out, || {
        let es = medium_eigensystem(k)?;
        Ok(QwsMediumEigensystem { k: es.k, lambdas: es.lambdas, alphas: es.alphas })
    })
}

/// Medium-weight runtime with `k = w/√M`.
///
/// # Safety
/// `out` must be null or valid for a write of `QwsMediumRuntime`.
#[no_mangle]
pub unsafe extern "C" fn qws_medium_runtime(m: usize, w: f64, out: *mut QwsMediumRuntime) -> QwsStatus {
    guard(out, || {
        let regime = perturbation::classify(m, w, &Thresholds::default())?;
        let rt = medium_runtime(&medium_eigensystem(regime.k)?, m, w)?;
        Ok(QwsMediumRuntime { root: rt.root, t_star: rt.t_star, p_star: rt.p_star })
    })
}

/// Largest `|p_a|` gap between the full `2M` space and the reduced system
/// over `samples` evenly spaced times in `[0, t_max]`. The size cap is read
/// from `QWSEARCH_MAX_FULLSPACE_M`.
///
/// # Safety
/// `out` must be null or valid for a write of `f64`.
#[no_mangle]
pub unsafe extern "C" fn qws_subspace_residual(
    m: usize,
    w: f64,
    gamma: f64,
    t_max: f64,
    samples: usize,
    out: *mut f64,
) -> QwsStatus {
    guard(out, || {
        if samples < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 samples, got {samples}")));
        }
        let cap = fullspace::max_m_from_env()?;
        let g = graph::build_linked_complete_capped(m, w, cap)?;
        let last = (samples - 1) as f64;
        let times: Vec<f64> = (0..samples).map(|i| t_max * i as f64 / last).collect();
        fullspace::subspace_residual_capped(&g, gamma, &times, cap)
    })
}

/// # Safety
/// `out` must be null or valid for a write of a pointer.
#[no_mangle]
pub unsafe extern "C" fn qws_graph_new(m: usize, w: f64, out: *mut *mut QwsGraph) -> QwsStatus {
    guard(out, || Ok(boxed(QwsGraph(graph::build_linked_complete(m, w)?))))
}

/// Number of vertices, `2M`; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle from [`qws_graph_new`].
#[no_mangle]
pub unsafe extern "C" fn qws_graph_vertex_count(g: *const QwsGraph) -> usize {
    handle(g).map_or(0, |g| g.0.vertex_count())
}

/// Weight of the edge `u ~ v`, 0 when absent.
///
/// # Safety
/// `g` must be null or a live handle; `out` must be null or valid for a
/// write of `f64`.
#[no_mangle]
pub unsafe extern "C" fn qws_graph_weight(g: *const QwsGraph, u: usize, v: usize, out: *mut f64) -> QwsStatus {
    let g = require!(handle(g));
    guard(out, || {
        let n = g.0.vertex_count();
        if u >= n || v >= n {
            return Err(Error::InvalidArgument(format!("vertex out of range 0..{n}: ({u}, {v})")));
        }
        Ok(g.0.weight(u, v))
    })
}

/// # Safety
/// `g` must be null or a handle from [`qws_graph_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qws_graph_free(g: *mut QwsGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Success-probability curve from the uniform superposition at rate `gamma`.
///
/// # Safety
/// `out` must be null or valid for a write of a pointer.
#[no_mangle]
pub unsafe extern "C" fn qws_curve_new(m: usize, w: f64, gamma: f64, out: *mut *mut QwsCurve) -> QwsStatus {
    guard(out, || Ok(boxed(QwsCurve(SuccessCurve::new(m, w, gamma)?))))
}

/// Probability of measuring the marked vertex at time `t`; NaN for a null
/// handle.
///
/// # Safety
/// `c` must be null or a live handle from [`qws_curve_new`].
#[no_mangle]
pub unsafe extern "C" fn qws_curve_p_a(c: *const QwsCurve, t: f64) -> f64 {
    handle(c).map_or(f64::NAN, |c| c.0.p_a(t))
}

/// Probability of measuring the marked vertex or its partner at time `t`;
/// NaN for a null handle.
///
/// # Safety
/// `c` must be null or a live handle from [`qws_curve_new`].
#[no_mangle]
pub unsafe extern "C" fn qws_curve_p_inferred(c: *const QwsCurve, t: f64) -> f64 {
    handle(c).map_or(f64::NAN, |c| c.0.p_inferred(t))
}

/// # Safety
/// `c` must be null or a handle from [`qws_curve_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qws_curve_free(c: *mut QwsCurve) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Samples `p_a` and `p_a + p_c` on `{0, dt, ..., t_max}`.
///
/// # Safety
/// `out` must be null or valid for a write of a pointer.
#[no_mangle]
pub unsafe extern "C" fn qws_trace_new(
    m: usize,
    w: f64,
    gamma: f64,
    t_max: f64,
    dt: f64,
    out: *mut *mut QwsTrace,
) -> QwsStatus {
    guard(out, || Ok(boxed(QwsTrace(evolve::trace(m, w, gamma, t_max, dt)?))))
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `tr` must be null or a live handle from [`qws_trace_new`].
#[no_mangle]
pub unsafe extern "C" fn qws_trace_len(tr: *const QwsTrace) -> usize {
    handle(tr).map_or(0, |tr| tr.0.len())
}

/// Sample `i` of the trace.
///
/// # Safety
/// `tr` must be null or a live handle; each of `t`, `p_a` and `p_inferred`
/// must be valid for a write of `f64`.
#[no_mangle]
pub unsafe extern "C" fn qws_trace_get(
    tr: *const QwsTrace,
    i: usize,
    t: *mut f64,
    p_a: *mut f64,
    p_inferred: *mut f64,
) -> QwsStatus {
    let tr = &require!(handle(tr)).0;
    if t.is_null() || p_a.is_null() || p_inferred.is_null() {
        set_error("output pointer is null".into());
        return QwsStatus::NullPointer;
    }
    if i >= tr.len() {
        set_error(format!("sample index {i} out of range 0..{}", tr.len()));
        return QwsStatus::InvalidArgument;
    }
    t.write(tr.times[i]);
    p_a.write(tr.p_a[i]);
    p_inferred.write(tr.p_inferred[i]);
    QwsStatus::Ok
}

/// # Safety
/// `tr` must be null or a handle from [`qws_trace_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qws_trace_free(tr: *mut QwsTrace) {
    if !tr.is_null() {
        drop(Box::from_raw(tr));
    }
}
