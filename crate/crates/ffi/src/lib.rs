//! C ABI for the xxz-bethe library.
//!
//! The surface is intentionally small: an opaque chain handle with a few
//! scalar accessors, and a JSON-in/JSON-out entry point that runs any CLI
//! subcommand and hands back the full report. Strings returned by this
//! library must be released with [`xxz_string_free`]; handles with
//! [`xxz_chain_free`]. Error details are retrievable per thread via
//! [`xxz_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use xxz_bethe::chain::ChainSpec;
use xxz_bethe::config::RunConfig;
use xxz_bethe::qalgebra::{script_a, script_d};
use xxz_bethe::run::{execute, Overrides, SUBCOMMANDS};
use xxz_bethe::scalar::C64;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XxzStatus {
    /// Success; for runs, every asserted check passed.
    Ok = 0,
    /// The run completed but at least one asserted check failed.
    CheckFailed = 1,
    /// A mathematical or configuration precondition was not met.
    Precondition = 2,
    /// Null pointer, malformed UTF-8/JSON, or an unknown subcommand.
    InvalidArgument = 3,
    /// Unexpected internal failure.
    Internal = 4,
}

/// Opaque chain handle.
pub struct XxzChain {
    spec: ChainSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<Vec<u8>>) {
    let cstring = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Message describing the most recent failure on this thread, or null. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn xxz_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|s| s.as_ptr())
            .unwrap_or(std::ptr::null())
    })
}

/// Library version as a static null-terminated string.
#[no_mangle]
pub extern "C" fn xxz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn read_cstr<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, XxzStatus> {
    if ptr.is_null() {
        set_last_error(format!("{what} must not be null"));
        return Err(XxzStatus::InvalidArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error(format!("{what} must be valid UTF-8"));
        XxzStatus::InvalidArgument
    })
}

/// Parse a JSON config (same format as the CLI accepts) into a chain handle.
///
/// # Safety
/// `config_json` must be a null-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xxz_chain_new(
    config_json: *const c_char,
    out: *mut *mut XxzChain,
) -> XxzStatus {
    clear_last_error();
    if out.is_null() {
        set_last_error("out must not be null");
        return XxzStatus::InvalidArgument;
    }
    *out = std::ptr::null_mut();
    let text = match read_cstr(config_json, "config_json") {
        Ok(t) => t,
        Err(s) => return s,
    };
    let cfg = match RunConfig::parse(text) {
        Ok(c) => c,
        Err(e) => {
            set_last_error(e.to_string());
            return XxzStatus::InvalidArgument;
        }
    };
    match cfg.resolve() {
        Ok((spec, _, _)) => {
            *out = Box::into_raw(Box::new(XxzChain { spec }));
            XxzStatus::Ok
        }
        Err(e) => {
            set_last_error(e.to_string());
            XxzStatus::Precondition
        }
    }
}

/// Release a chain handle. Null is accepted.
///
/// # Safety
/// `chain` must have come from [`xxz_chain_new`] and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn xxz_chain_free(chain: *mut XxzChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Hilbert-space dimension of the chain; 0 for a null handle.
///
/// # Safety
/// `chain` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn xxz_chain_dimension(chain: *const XxzChain) -> usize {
    chain.as_ref().map(|c| c.spec.dim()).unwrap_or(0)
}

/// Number of chain sites; 0 for a null handle.
///
/// # Safety
/// `chain` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn xxz_chain_sites(chain: *const XxzChain) -> usize {
    chain.as_ref().map(|c| c.spec.n_sites()).unwrap_or(0)
}

/// Dimension of the weight sector with excitation number `k`.
///
/// # Safety
/// `chain` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn xxz_chain_weight_sector_dim(chain: *const XxzChain, k: usize) -> usize {
    chain
        .as_ref()
        .map(|c| c.spec.weight_sector_dim(k))
        .unwrap_or(0)
}

unsafe fn eval_script(
    chain: *const XxzChain,
    u_re: f64,
    u_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    which_a: bool,
) -> XxzStatus {
    clear_last_error();
    let Some(c) = chain.as_ref() else {
        set_last_error("chain must not be null");
        return XxzStatus::InvalidArgument;
    };
    if out_re.is_null() || out_im.is_null() {
        set_last_error("output pointers must not be null");
        return XxzStatus::InvalidArgument;
    }
    let ctx = c.spec.gamma_ctx();
    let u = C64::new(u_re, u_im);
    let v = if which_a {
        script_a(&c.spec, &ctx, u)
    } else {
        script_d(&c.spec, &ctx, u)
    };
    *out_re = v.re;
    *out_im = v.im;
    XxzStatus::Ok
}

/// Vacuum eigenvalue of A(u) at `u = u_re + i u_im`.
///
/// # Safety
/// `chain` must be a live handle; `out_re`/`out_im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn xxz_chain_script_a(
    chain: *const XxzChain,
    u_re: f64,
    u_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> XxzStatus {
    eval_script(chain, u_re, u_im, out_re, out_im, true)
}

/// Vacuum eigenvalue of D(u) at `u = u_re + i u_im`.
///
/// # Safety
/// `chain` must be a live handle; `out_re`/`out_im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn xxz_chain_script_d(
    chain: *const XxzChain,
    u_re: f64,
    u_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> XxzStatus {
    eval_script(chain, u_re, u_im, out_re, out_im, false)
}

/// Run one subcommand (`identities`, `solve`, `verify`, `census`,
/// `nilpotency`, `degenerate`, `xeq`, `spectrum`) on a JSON config and hand
/// back the full JSON report, which is produced for check failures and
/// precondition failures too. Free the report with [`xxz_string_free`].
///
/// # Safety
/// `subcommand` and `config_json` must be null-terminated strings;
/// `out_report_json` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn xxz_run_json(
    subcommand: *const c_char,
    config_json: *const c_char,
    out_report_json: *mut *mut c_char,
) -> XxzStatus {
    clear_last_error();
    if out_report_json.is_null() {
        set_last_error("out_report_json must not be null");
        return XxzStatus::InvalidArgument;
    }
    *out_report_json = std::ptr::null_mut();
    let sub = match read_cstr(subcommand, "subcommand") {
        Ok(s) => s,
        Err(st) => return st,
    };
    if !SUBCOMMANDS.contains(&sub) {
        set_last_error(format!(
            "unknown subcommand `{sub}`; expected one of {SUBCOMMANDS:?}"
        ));
        return XxzStatus::InvalidArgument;
    }
    let text = match read_cstr(config_json, "config_json") {
        Ok(t) => t,
        Err(st) => return st,
    };
    let cfg = match RunConfig::parse(text) {
        Ok(c) => c,
        Err(e) => {
            set_last_error(e.to_string());
            return XxzStatus::InvalidArgument;
        }
    };
    let (report, exit) = execute(sub, &cfg, &Overrides::default());
    let rendered = report.to_json();
    let cstring = match CString::new(rendered) {
        Ok(s) => s,
        Err(_) => {
            set_last_error("report contained interior NUL");
            return XxzStatus::Internal;
        }
    };
    *out_report_json = cstring.into_raw();
    match exit {
        0 => XxzStatus::Ok,
        2 => {
            if let Some(err) = &report.error {
                set_last_error(err.clone());
            }
            XxzStatus::Precondition
        }
        _ => {
            if let Some(err) = &report.error {
                set_last_error(err.clone());
                XxzStatus::Internal
            } else {
                XxzStatus::CheckFailed
            }
        }
    }
}

/// Release a string returned by this library. Null is accepted.
///
/// # Safety
/// `s` must have been returned by this library and not been freed before.
#[no_mangle]
pub unsafe extern "C" fn xxz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
