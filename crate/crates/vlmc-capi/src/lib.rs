//! C ABI for the vlmc library.
//!
//! Conventions:
//! - Opaque handles (`VlmcTree`, `VlmcChain`, `VlmcPerturbed`) are created
//!   by `*_new`/`*_parse` functions and released by the matching `*_free`.
//! - Every fallible call returns a [`VlmcStatus`]; results come back
//!   through out-pointers. `vlmc_last_error` returns a thread-local
//!   message for the most recent failure on the calling thread.
//! - Sequences cross the boundary as NUL-terminated `0`/`1` strings with
//!   the most recent symbol on the right (`"."` or `""` is the empty
//!   sequence); samples cross as byte buffers holding the values 0 and 1.
//! - Strings returned through out-pointers are allocated by this library
//!   and must be released with `vlmc_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use vlmc::bounds::{min_sample_size, recovery_error_bound, BoundParams};
use vlmc::{
    estimate_tree, ChainLaw, ContextTree, Error, NoiseChannel, PerturbedLaw, SamplePath, Seq,
    Symbol,
};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VlmcStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed input text (tree/sample/config formats).
    ParseError = 3,
    /// Structurally valid input violating a model invariant.
    ValidationError = 4,
    /// Arguments outside the supported domain (caps, empty windows,
    /// inadmissible parameters).
    DomainError = 5,
    /// Operating system I/O failure.
    IoError = 6,
    /// An internal invariant failed; the handle is still usable.
    InternalError = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let clean: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(clean).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> VlmcStatus {
    match err {
        Error::BadSymbol(_)
        | Error::TreeFormat { .. }
        | Error::SampleFormat(_)
        | Error::ConfigFormat { .. }
        | Error::SequenceTooLong { .. } => VlmcStatus::ParseError,
        Error::DuplicateContext(_)
        | Error::SuffixViolation { .. }
        | Error::RowSum { .. }
        | Error::NonNull { .. }
        | Error::Incomplete(_)
        | Error::NoMatchingContext(_)
        | Error::ConfigInvalid(_) => VlmcStatus::ValidationError,
        Error::Io(_) => VlmcStatus::IoError,
        _ => VlmcStatus::DomainError,
    }
}

fn fail(err: Error) -> VlmcStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

fn fail_with(status: VlmcStatus, msg: &str) -> VlmcStatus {
    set_error(msg);
    status
}

/// Runs `f` with panics converted to `InternalError`.
fn guarded<F: FnOnce() -> VlmcStatus>(f: F) -> VlmcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail_with(VlmcStatus::InternalError, "internal panic"),
    }
}

/// Message for the most recent failure on this thread; valid until the
/// next failing call from the same thread.
#[no_mangle]
pub extern "C" fn vlmc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned through an out-pointer.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn vlmc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, VlmcStatus> {
    if ptr.is_null() {
        return Err(fail_with(VlmcStatus::NullPointer, "NULL string argument"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail_with(VlmcStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn read_seq(ptr: *const c_char) -> Result<Seq, VlmcStatus> {
    let text = read_str(ptr)?;
    if text.is_empty() {
        return Ok(Seq::EMPTY);
    }
    Seq::parse(text).map_err(fail)
}

fn out_string(text: String, out: *mut *mut c_char) -> VlmcStatus {
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            VlmcStatus::Ok
        }
        Err(_) => fail_with(VlmcStatus::InternalError, "interior NUL in output"),
    }
}

// ---------------------------------------------------------------------------
// Trees
// ---------------------------------------------------------------------------

/// Opaque probabilistic context tree.
pub struct VlmcTree(ContextTree);

/// Scalar constants of a tree.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VlmcTreeConstants {
    /// Smallest transition probability.
    pub alpha: f64,
    /// Summed continuity rate.
    pub beta: f64,
    /// Product of (1 + beta_k).
    pub beta_star: f64,
    /// 1 + 4*beta*beta_star/alpha.
    pub c_const: f64,
}

/// Parses the tree file format (`<context> <p0> <p1>` lines, `#` comments).
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vlmc_tree_parse(
    text: *const c_char,
    out: *mut *mut VlmcTree,
) -> VlmcStatus {
    guarded(|| {
        if out.is_null() {
            return fail_with(VlmcStatus::NullPointer, "NULL out pointer");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match ContextTree::parse(text) {
            Ok(tree) => {
                *out = Box::into_raw(Box::new(VlmcTree(tree)));
                VlmcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `tree` must come from `vlmc_tree_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn vlmc_tree_free(tree: *mut VlmcTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Height of the tree; 0 for a NULL handle.
///
/// # Safety
/// `tree` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn vlmc_tree_height(tree: *const VlmcTree) -> u32 {
    tree.as_ref().map_or(0, |t| t.0.height() as u32)
}

/// Number of contexts; 0 for a NULL handle.
///
/// # Safety
/// `tree` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn vlmc_tree_num_contexts(tree: *const VlmcTree) -> u32 {
    tree.as_ref().map_or(0, |t| t.0.num_contexts() as u32)
}

/// 1 when every past has a matching context, else 0.
///
/// # Safety
/// `tree` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn vlmc_tree_is_complete(tree: *const VlmcTree) -> i32 {
    tree.as_ref().map_or(0, |t| t.0.is_complete() as i32)
}

/// 1 when no context can be replaced by a proper suffix, else 0.
///
/// # Safety
/// `tree` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn vlmc_tree_is_irreducible(tree: *const VlmcTree) -> i32 {
    tree.as_ref().map_or(0, |t| t.0.is_irreducible() as i32)
}

/// Fills the scalar constants of the tree.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vlmc_tree_constants(
    tree: *const VlmcTree,
    out: *mut VlmcTreeConstants,
) -> VlmcStatus {
    guarded(|| {
        let (Some(tree), false) = (tree.as_ref(), out.is_null()) else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        let c = tree.0.constants();
        *out = VlmcTreeConstants {
            alpha: c.alpha,
            beta: c.beta,
            beta_star: c.beta_star,
            c_const: c.c_const,
        };
        VlmcStatus::Ok
    })
}

/// Continuity-rate entry `beta_k`; zero beyond the tree height.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vlmc_tree_continuity_rate(
    tree: *const VlmcTree,
    k: u32,
    out: *mut f64,
) -> VlmcStatus {
    guarded(|| {
        let (Some(tree), false) = (tree.as_ref(), out.is_null()) else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        let seq = tree.0.constants().beta_seq;
        *out = seq.get(k as usize).copied().unwrap_or(0.0);
        VlmcStatus::Ok
    })
}

/// Serializes the tree to its file format.
///
/// # Safety
/// Both pointers must be valid; free the result with `vlmc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn vlmc_tree_serialize(
    tree: *const VlmcTree,
    out: *mut *mut c_char,
) -> VlmcStatus {
    guarded(|| {
        let (Some(tree), false) = (tree.as_ref(), out.is_null()) else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        out_string(tree.0.serialize(), out)
    })
}

// ---------------------------------------------------------------------------
// Chain law
// ---------------------------------------------------------------------------

/// Opaque exact law of the hidden chain.
pub struct VlmcChain(ChainLaw);

/// Builds the exact law (embedding + stationary solve) of a complete tree.
///
/// # Safety
/// `tree` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vlmc_chain_new(
    tree: *const VlmcTree,
    out: *mut *mut VlmcChain,
) -> VlmcStatus {
    guarded(|| {
        let (Some(tree), false) = (tree.as_ref(), out.is_null()) else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        match ChainLaw::new(tree.0.clone()) {
            Ok(law) => {
                *out = Box::into_raw(Box::new(VlmcChain(law)));
                VlmcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `chain` must come from `vlmc_chain_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn vlmc_chain_free(chain: *mut VlmcChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Stationary cylinder probability `p(w)`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vlmc_chain_marginal(
    chain: *const VlmcChain,
    w: *const c_char,
    out: *mut f64,
) -> VlmcStatus {
    guarded(|| {
        let (Some(chain), false) = (chain.as_ref(), out.is_null()) else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        let w = match read_seq(w) {
            Ok(w) => w,
            Err(s) => return s,
        };
        *out = chain.0.marginal(w);
        VlmcStatus::Ok
    })
}

/// Conditional `p(a|w)` for an arbitrary finite past.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vlmc_chain_conditional(
    chain: *const VlmcChain,
    symbol: u8,
    w: *const c_char,
    out: *mut f64,
) -> VlmcStatus {
    guarded(|| {
        let (Some(chain), false) = (chain.as_ref(), out.is_null()) else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        let a = match Symbol::new(symbol) {
            Ok(a) => a,
            Err(e) => return fail(e),
        };
        let w = match read_seq(w) {
            Ok(w) => w,
            Err(s) => return s,
        };
        match chain.0.conditional(a, w) {
            Ok(p) => {
                *out = p;
                VlmcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Detection gap `D_k`; +inf when no context is that short.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vlmc_chain_signal_gap(
    chain: *const VlmcChain,
    k: u32,
    out: *mut f64,
) -> VlmcStatus {
    guarded(|| {
        let (Some(chain), false) = (chain.as_ref(), out.is_null()) else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        if k == 0 {
            return fail_with(VlmcStatus::DomainError, "k must be at least 1");
        }
        *out = chain.0.signal_gap(k as usize);
        VlmcStatus::Ok
    })
}

/// Draws a stationary path of length `len` into `buf` as 0/1 byte values.
///
/// # Safety
/// `buf` must point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn vlmc_chain_sample(
    chain: *const VlmcChain,
    len: usize,
    seed: u64,
    buf: *mut u8,
) -> VlmcStatus {
    guarded(|| {
        let (Some(chain), false) = (chain.as_ref(), buf.is_null()) else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        match chain.0.sample(len, seed) {
            Ok(path) => {
                let out = std::slice::from_raw_parts_mut(buf, len);
                for (dst, s) in out.iter_mut().zip(path.symbols.iter()) {
                    *dst = s.value();
                }
                VlmcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

// ---------------------------------------------------------------------------
// Noise channel and observed law
// ---------------------------------------------------------------------------

/// Opaque exact law of the observed (flipped) chain.
pub struct VlmcPerturbed(PerturbedLaw);

/// Report of the exhaustive conditional-gap certificate.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VlmcGapCertificate {
    pub epsilon: f64,
    pub max_gap: f64,
    pub bound: f64,
    /// 1 when max_gap <= bound (+1e-10), else 0.
    pub holds: i32,
}

/// Report of the exhaustive floor checks.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VlmcFloorReport {
    pub alpha: f64,
    pub min_conditional: f64,
    pub max_flip_posterior: f64,
    pub posterior_bound: f64,
    pub conditional_holds: i32,
    pub posterior_holds: i32,
}

/// Flips each 0/1 byte of `buf` independently with probability `eps`,
/// in place; deterministic for a given seed.
///
/// # Safety
/// `buf` must point to `len` bytes holding only 0 and 1 values.
#[no_mangle]
pub unsafe extern "C" fn vlmc_perturb(
    buf: *mut u8,
    len: usize,
    eps: f64,
    seed: u64,
) -> VlmcStatus {
    guarded(|| {
        if buf.is_null() {
            return fail_with(VlmcStatus::NullPointer, "NULL buffer");
        }
        let channel = match NoiseChannel::new(eps) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        let slice = std::slice::from_raw_parts_mut(buf, len);
        let symbols: Result<Vec<Symbol>, Error> =
            slice.iter().map(|&b| Symbol::new(b)).collect();
        match symbols {
            Ok(symbols) => {
                let path = SamplePath::from_symbols(symbols);
                let noisy = channel.perturb(&path, seed);
                for (dst, s) in slice.iter_mut().zip(noisy.symbols.iter()) {
                    *dst = s.value();
                }
                VlmcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Builds the observed-chain law for a chain and a flip probability.
///
/// # Safety
/// `chain` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn vlmc_perturbed_new(
    chain: *const VlmcChain,
    eps: f64,
    out: *mut *mut VlmcPerturbed,
) -> VlmcStatus {
    guarded(|| {
        let (Some(chain), false) = (chain.as_ref(), out.is_null()) else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        match NoiseChannel::new(eps) {
            Ok(channel) => {
                let law = PerturbedLaw::new(chain.0.clone(), channel);
                *out = Box::into_raw(Box::new(VlmcPerturbed(law)));
                VlmcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `law` must come from `vlmc_perturbed_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn vlmc_perturbed_free(law: *mut VlmcPerturbed) {
    if !law.is_null() {
        drop(Box::from_raw(law));
    }
}

/// Observed cylinder probability `q(w)`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vlmc_perturbed_marginal(
    law: *const VlmcPerturbed,
    w: *const c_char,
    out: *mut f64,
) -> VlmcStatus {
    guarded(|| {
        let (Some(law), false) = (law.as_ref(), out.is_null()) else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        let w = match read_seq(w) {
            Ok(w) => w,
            Err(s) => return s,
        };
        match law.0.marginal(w) {
            Ok(q) => {
                *out = q;
                VlmcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Observed conditional `q(a|w)`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vlmc_perturbed_conditional(
    law: *const VlmcPerturbed,
    symbol: u8,
    w: *const c_char,
    out: *mut f64,
) -> VlmcStatus {
    guarded(|| {
        let (Some(law), false) = (law.as_ref(), out.is_null()) else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        let a = match Symbol::new(symbol) {
            Ok(a) => a,
            Err(e) => return fail(e),
        };
        let w = match read_seq(w) {
            Ok(w) => w,
            Err(s) => return s,
        };
        match law.0.conditional(a, w) {
            Ok(q) => {
                *out = q;
                VlmcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Minimum positive cylinder probability over windows of length <= d.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vlmc_perturbed_min_cylinder(
    law: *const VlmcPerturbed,
    d: u32,
    out: *mut f64,
) -> VlmcStatus {
    guarded(|| {
        let (Some(law), false) = (law.as_ref(), out.is_null()) else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        match law.0.min_cylinder_prob(d as usize) {
            Ok(q) => {
                *out = q;
                VlmcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Exhaustive conditional-gap certificate up to window length `j_max`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vlmc_perturbed_certify(
    law: *const VlmcPerturbed,
    j_max: u32,
    out: *mut VlmcGapCertificate,
) -> VlmcStatus {
    guarded(|| {
        let (Some(law), false) = (law.as_ref(), out.is_null()) else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        match law.0.certify_gap(j_max as usize) {
            Ok(report) => {
                *out = VlmcGapCertificate {
                    epsilon: report.epsilon,
                    max_gap: report.max_gap,
                    bound: report.bound,
                    holds: report.holds as i32,
                };
                VlmcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Exhaustive floor checks up to window length `k_max`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vlmc_perturbed_floors(
    law: *const VlmcPerturbed,
    k_max: u32,
    out: *mut VlmcFloorReport,
) -> VlmcStatus {
    guarded(|| {
        let (Some(law), false) = (law.as_ref(), out.is_null()) else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        match law.0.check_floors(k_max as usize) {
            Ok(report) => {
                *out = VlmcFloorReport {
                    alpha: report.alpha,
                    min_conditional: report.min_conditional,
                    max_flip_posterior: report.max_flip_posterior,
                    posterior_bound: report.posterior_bound,
                    conditional_holds: report.conditional_holds as i32,
                    posterior_holds: report.posterior_holds as i32,
                };
                VlmcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// The exact threshold window at depth `d`; a usable threshold exists
/// exactly when `*low < *high`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vlmc_perturbed_delta_window(
    law: *const VlmcPerturbed,
    d: u32,
    low: *mut f64,
    high: *mut f64,
) -> VlmcStatus {
    guarded(|| {
        if low.is_null() || high.is_null() {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        }
        let Some(law) = law.as_ref() else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        match law.0.exact_delta_window(d as usize) {
            Ok(w) => {
                *low = w.low;
                *high = w.high;
                VlmcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

// ---------------------------------------------------------------------------
// Estimation and bounds
// ---------------------------------------------------------------------------

/// Inputs for the recovery error bound; mirror of the library struct.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct VlmcBoundParams {
    pub d: u32,
    pub k: u32,
    pub n: u64,
    pub delta: f64,
    pub epsilon: f64,
    pub c_const: f64,
    pub beta: f64,
    pub signal_gap: f64,
    pub min_cylinder: f64,
    pub min_depth: u32,
}

impl VlmcBoundParams {
    fn to_params(self) -> BoundParams {
        BoundParams {
            d: self.d as usize,
            k: self.k as usize,
            n: self.n,
            delta: self.delta,
            epsilon: self.epsilon,
            c_const: self.c_const,
            beta: self.beta,
            signal_gap: self.signal_gap,
            min_cylinder: self.min_cylinder,
            min_depth: self.min_depth as usize,
        }
    }
}

/// Estimates a context tree from a 0/1 byte sample and returns the tree
/// file text (free with `vlmc_string_free`).
///
/// # Safety
/// `sample` must point to `len` bytes of 0/1 values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn vlmc_estimate(
    sample: *const u8,
    len: usize,
    delta: f64,
    d: u32,
    out: *mut *mut c_char,
) -> VlmcStatus {
    guarded(|| {
        if sample.is_null() || out.is_null() {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        }
        let bytes = std::slice::from_raw_parts(sample, len);
        let symbols: Result<Vec<Symbol>, Error> =
            bytes.iter().map(|&b| Symbol::new(b)).collect();
        let symbols = match symbols {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        let path = SamplePath::from_symbols(symbols);
        match estimate_tree(&path, delta, d as usize) {
            Ok(est) => out_string(est.serialize(), out),
            Err(e) => fail(e),
        }
    })
}

/// Evaluates the recovery error bound (raw, possibly above 1).
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vlmc_recovery_error_bound(
    params: *const VlmcBoundParams,
    out: *mut f64,
) -> VlmcStatus {
    guarded(|| {
        let (Some(params), false) = (params.as_ref(), out.is_null()) else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        match recovery_error_bound(&params.to_params()) {
            Ok(b) => {
                *out = b.raw;
                VlmcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Smallest sample size for which the bound applies.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn vlmc_min_sample_size(
    params: *const VlmcBoundParams,
    out: *mut u64,
) -> VlmcStatus {
    guarded(|| {
        let (Some(params), false) = (params.as_ref(), out.is_null()) else {
            return fail_with(VlmcStatus::NullPointer, "NULL argument");
        };
        match min_sample_size(&params.to_params()) {
            Ok(n) => {
                *out = n;
                VlmcStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
