//! C ABI for the mincast solvers.
//!
//! Networks and solutions are opaque handles created by `mc_*` constructors
//! and released with the matching `*_free`. Every fallible call returns a
//! [`McStatus`]; on failure `mc_last_error` describes the cause for the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mincast::baselines::{dst_approx, DEFAULT_DST_LEVEL};
use mincast::flowcore::solve_multicast_lp;
use mincast::netmodel::io::{read_network, NetworkDoc};
use mincast::netmodel::{MulticastRequest, Network};
use mincast::subgrad::{dual_subgradient_solve, DualProblem, SubgradConfig};
use mincast::wireless::{solve_lossless, solve_lossy};
use mincast::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidNetwork = 3,
    UnknownNode = 4,
    InvalidArgument = 5,
    Infeasible = 6,
    Numerical = 7,
    Panic = 8,
}

/// Solver selection for [`mc_solve`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McMethod {
    /// Exact coded LP.
    Lp = 0,
    /// Steiner tree approximation; wireline networks only.
    SteinerTree = 1,
    /// Decentralised subgradient solver, 50 iterations.
    Subgradient = 2,
}

/// Opaque network handle.
pub struct McNetwork(NetworkDoc);

/// Opaque solution handle.
pub struct McSolution {
    cost: f64,
    rates: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: McStatus, message: String) -> McStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
    status
}

fn status_of(e: &Error) -> McStatus {
    match e {
        Error::Instance { source, .. } => status_of(source),
        Error::InvalidNetwork(_) | Error::Document(_) => McStatus::InvalidNetwork,
        Error::UnknownNode(_) => McStatus::UnknownNode,
        Error::InvalidRequest(_) | Error::InvalidArgument(_) | Error::Config(_) => McStatus::InvalidArgument,
        Error::Unreachable { .. } | Error::InfeasibleDemand { .. } | Error::LpInfeasible | Error::Infeasible(_) => {
            McStatus::Infeasible
        }
        _ => McStatus::Numerical,
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), McStatusError>>(f: F) -> McStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => McStatus::Ok,
        Ok(Err(McStatusError(s, m))) => fail(s, m),
        Err(_) => fail(McStatus::Panic, "internal panic".into()),
    }
}

struct McStatusError(McStatus, String);

impl From<Error> for McStatusError {
    fn from(e: Error) -> Self {
        McStatusError(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> McStatusError {
    McStatusError(McStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, McStatusError> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| McStatusError(McStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn publish<T>(out: *mut *mut T, value: T) -> Result<(), McStatusError> {
    if out.is_null() {
        return Err(null("out"));
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn mc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// The seven-node butterfly with nodes `s, a, b, c, d, t1, t2`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mc_network_butterfly(out: *mut *mut McNetwork) -> McStatus {
    guard(|| publish(out, McNetwork(NetworkDoc::Wireline(Network::butterfly()))))
}

/// Parse a JSON network document.
///
/// # Safety
/// `json` must be null or a NUL-terminated string; `out` must be null or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mc_network_from_json(json: *const c_char, out: *mut *mut McNetwork) -> McStatus {
    guard(|| {
        let doc = read_network(text(json, "json")?)?;
        publish(out, McNetwork(doc))
    })
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mc_network_node_count(net: *const McNetwork) -> usize {
    match net.as_ref() {
        Some(McNetwork(NetworkDoc::Wireline(n))) => n.node_count(),
        Some(McNetwork(NetworkDoc::Wireless(h))) => h.node_count(),
        None => 0,
    }
}

/// Number of arcs or hyperarcs, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mc_network_arc_count(net: *const McNetwork) -> usize {
    match net.as_ref() {
        Some(McNetwork(NetworkDoc::Wireline(n))) => n.arc_count(),
        Some(McNetwork(NetworkDoc::Wireless(h))) => h.hyperarc_count(),
        None => 0,
    }
}

/// # Safety
/// `net` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mc_network_free(net: *mut McNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

fn solve(doc: &NetworkDoc, source: &str, sinks: &[&str], rate: f64, method: McMethod) -> Result<McSolution, McStatusError> {
    let sg = SubgradConfig { iterations: 50, ..SubgradConfig::default() };
    match doc {
        NetworkDoc::Wireline(net) => {
            let s = net.require(source)?;
            let t = sinks.iter().map(|x| net.require(x)).collect::<mincast::Result<Vec<_>>>()?;
            let req = MulticastRequest::new(net.node_count(), s, &t, rate)?;
            let (cost, z) = match method {
                McMethod::Lp => {
                    let r = solve_multicast_lp(net, &req)?;
                    (r.cost, r.z)
                }
                McMethod::SteinerTree => {
                    let tree = dst_approx(net, s, &t, DEFAULT_DST_LEVEL)?;
                    (tree.cost * rate, tree.subgraph(net.arc_count(), rate))
                }
                McMethod::Subgradient => {
                    let r = dual_subgradient_solve(DualProblem::Wireline(net), &req, &sg)?;
                    (r.cost, r.z)
                }
            };
            Ok(McSolution { cost, rates: z.rates().to_vec() })
        }
        NetworkDoc::Wireless(h) => {
            let s = h.require(source)?;
            let t = sinks.iter().map(|x| h.require(x)).collect::<mincast::Result<Vec<_>>>()?;
            let req = MulticastRequest::new(h.node_count(), s, &t, rate)?;
            let (cost, z) = match method {
                McMethod::Lp if h.reception().is_some() => {
                    let r = solve_lossy(h, &req)?;
                    (r.cost, r.z)
                }
                McMethod::Lp => {
                    let r = solve_lossless(h, &req)?;
                    (r.cost, r.z)
                }
                McMethod::Subgradient => {
                    let r = dual_subgradient_solve(DualProblem::Wireless(h), &req, &sg)?;
                    (r.cost, r.z)
                }
                McMethod::SteinerTree => {
                    return Err(McStatusError(McStatus::InvalidArgument, "Steiner trees need a wireline network".into()))
                }
            };
            Ok(McSolution { cost, rates: z.rates().to_vec() })
        }
    }
}

/// Minimum-cost subgraph for a rate-`rate` multicast from `source` to the
/// `n_sinks` named sinks.
///
/// # Safety
/// `net` must be null or a live handle, `source` and each of the `n_sinks`
/// entries of `sinks` NUL-terminated strings, `out` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mc_solve(
    net: *const McNetwork,
    source: *const c_char,
    sinks: *const *const c_char,
    n_sinks: usize,
    rate: f64,
    method: McMethod,
    out: *mut *mut McSolution,
) -> McStatus {
    guard(|| {
        let net = net.as_ref().ok_or_else(|| null("net"))?;
        let source = text(source, "source")?;
        if sinks.is_null() {
            return Err(null("sinks"));
        }
        let names = std::slice::from_raw_parts(sinks, n_sinks)
            .iter()
            .map(|&p| text(p, "sink"))
            .collect::<Result<Vec<_>, _>>()?;
        publish(out, solve(&net.0, source, &names, rate, method)?)
    })
}

/// Total cost, or NaN for a null handle.
///
/// # Safety
/// `sol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mc_solution_cost(sol: *const McSolution) -> f64 {
    sol.as_ref().map_or(f64::NAN, |s| s.cost)
}

/// Copy up to `len` arc rates into `buf`. Returns the number of arcs.
///
/// # Safety
/// `sol` must be null or a live handle; `buf` null or valid for `len`
/// writes.
#[no_mangle]
pub unsafe extern "C" fn mc_solution_rates(sol: *const McSolution, buf: *mut f64, len: usize) -> usize {
    let Some(s) = sol.as_ref() else { return 0 };
    if !buf.is_null() {
        ptr::copy_nonoverlapping(s.rates.as_ptr(), buf, s.rates.len().min(len));
    }
    s.rates.len()
}

/// # Safety
/// `sol` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mc_solution_free(sol: *mut McSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    fn message() -> String {
        let mut buf = [0 as c_char; 128];
        unsafe { mc_last_error(buf.as_mut_ptr(), buf.len()) };
        unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
    }

    #[test]
    fn butterfly_round_trip() {
        unsafe {
            let mut net = ptr::null_mut();
            assert_eq!(mc_network_butterfly(&mut net), McStatus::Ok);
            assert_eq!((mc_network_node_count(net), mc_network_arc_count(net)), (7, 9));
            let s = CString::new("s").unwrap();
            let t: Vec<CString> = ["t1", "t2"].iter().map(|x| CString::new(*x).unwrap()).collect();
            let tp: Vec<*const c_char> = t.iter().map(|c| c.as_ptr()).collect();
            for (method, want) in [(McMethod::Lp, 9.5), (McMethod::SteinerTree, 10.0)] {
                let mut sol = ptr::null_mut();
                assert_eq!(mc_solve(net, s.as_ptr(), tp.as_ptr(), 2, 1.0, method, &mut sol), McStatus::Ok);
                assert!((mc_solution_cost(sol) - want).abs() < 1e-8);
                let mut rates = [0.0; 9];
                assert_eq!(mc_solution_rates(sol, rates.as_mut_ptr(), 9), 9);
                assert!(rates.iter().all(|&r| (0.0..=1.0 + 1e-9).contains(&r)));
                mc_solution_free(sol);
            }
            mc_network_free(net);
        }
    }

    #[test]
    fn errors_set_codes_and_messages() {
        unsafe {
            let mut net = ptr::null_mut();
            assert_eq!(mc_network_from_json(ptr::null(), &mut net), McStatus::NullPointer);
            let bad = CString::new("{\"nodes\": [").unwrap();
            assert_eq!(mc_network_from_json(bad.as_ptr(), &mut net), McStatus::InvalidNetwork);
            assert!(!message().is_empty());
            mc_network_butterfly(&mut net);
            let s = CString::new("s").unwrap();
            let t = CString::new("zz").unwrap();
            let mut sol = ptr::null_mut();
            let tp = [t.as_ptr()];
            assert_eq!(mc_solve(net, s.as_ptr(), tp.as_ptr(), 1, 1.0, McMethod::Lp, &mut sol), McStatus::UnknownNode);
            assert!(message().contains("zz"));
            assert!(sol.is_null());
            assert!(mc_solution_cost(sol).is_nan());
            mc_network_free(net);
        }
    }
}
