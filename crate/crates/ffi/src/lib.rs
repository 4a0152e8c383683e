// SPDX-License-Identifier: Apache-2.0

//! C interface. Graphs are opaque handles owned by the caller and released
//! with `corelab_graph_free`; every fallible call returns a status code and
//! leaves a message for `corelab_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use corelab::linalg::{
    fraction_free_rank, rank_gf2, rational_rank, BitMatrix, Certainty, DEFAULT_FRACTION_FREE_CAP,
};
use corelab::rng::{tag_id, RngStream};
use corelab::{graph, samplers, Error, Graph};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorelabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    CapExceeded = 4,
    Io = 5,
    Internal = 6,
}

/// Opaque graph handle.
pub struct CorelabGraph {
    inner: Graph,
}

/// Rank of an adjacency matrix over the rationals.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CorelabRank {
    pub n: usize,
    pub rank: usize,
    /// 1 when the rank is certified exact, 0 when it is a lower bound.
    pub exact: i32,
    /// Probability bound on the rank being too low; 0 when exact.
    pub failure_bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> CorelabStatus {
    match e {
        Error::Parse { .. } => CorelabStatus::Parse,
        Error::CapExceeded { .. } | Error::RejectionCap(_) => CorelabStatus::CapExceeded,
        Error::Io(_) | Error::Json(_) => CorelabStatus::Io,
        _ => CorelabStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (CorelabStatus, String)>) -> CorelabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CorelabStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CorelabStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (CorelabStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (CorelabStatus, String) {
    (CorelabStatus::NullPointer, format!("{what} is null"))
}

unsafe fn graph_ref<'a>(g: *const CorelabGraph) -> Result<&'a Graph, (CorelabStatus, String)> {
    g.as_ref().map(|g| &g.inner).ok_or_else(|| null("graph"))
}

unsafe fn emit(out: *mut *mut CorelabGraph, g: Graph) -> Result<(), (CorelabStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(CorelabGraph { inner: g }));
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn corelab_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds a simple graph on `n` vertices from `m` edges stored as pairs in
/// `edges` (length `2m`).
///
/// # Safety
/// `edges` must be valid for `2m` reads when `m > 0`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corelab_graph_from_edges(
    n: usize,
    edges: *const u32,
    m: usize,
    out: *mut *mut CorelabGraph,
) -> CorelabStatus {
    guard(|| {
        if edges.is_null() && m > 0 {
            return Err(null("edges"));
        }
        let flat: &[u32] = if m == 0 {
            &[]
        } else {
            std::slice::from_raw_parts(edges, 2 * m)
        };
        let pairs = flat.chunks_exact(2).map(|c| (c[0] as usize, c[1] as usize));
        emit(out, Graph::from_edges(n, pairs).map_err(lib_err)?)
    })
}

/// Parses a graph in edge-list text format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corelab_graph_parse(
    text: *const c_char,
    out: *mut *mut CorelabGraph,
) -> CorelabStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let bytes = CStr::from_ptr(text).to_bytes();
        emit(out, graph::read_edge_list(bytes).map_err(lib_err)?)
    })
}

/// Draws `G(n, lambda / n)` from the stream keyed by `seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corelab_graph_sample_gnp(
    n: usize,
    lambda: f64,
    seed: u64,
    out: *mut *mut CorelabGraph,
) -> CorelabStatus {
    guard(|| {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err((
                CorelabStatus::InvalidArgument,
                format!("lambda = {lambda} is invalid"),
            ));
        }
        let mut rng = RngStream::new(seed, tag_id("sample"));
        let p = (lambda / n.max(1) as f64).min(1.0);
        emit(out, samplers::gnp(n, p, &mut rng))
    })
}

/// Releases a graph. Null is ignored.
///
/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn corelab_graph_free(g: *mut CorelabGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Vertex count, or 0 for null.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn corelab_graph_n(g: *const CorelabGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.n())
}

/// Edge count, or 0 for null.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn corelab_graph_m(g: *const CorelabGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.m())
}

/// The `k`-core of `g`, relabeled to `0..|core|`.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corelab_kcore(
    g: *const CorelabGraph,
    k: usize,
    out: *mut *mut CorelabGraph,
) -> CorelabStatus {
    guard(|| {
        let g = graph_ref(g)?;
        emit(out, graph::k_core(g, k).1.graph)
    })
}

/// Rank of the adjacency matrix over GF(2).
///
/// # Safety
/// `g` must be a live handle; `rank` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corelab_rank_gf2(
    g: *const CorelabGraph,
    rank: *mut usize,
) -> CorelabStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if rank.is_null() {
            return Err(null("rank"));
        }
        *rank = rank_gf2(&BitMatrix::adjacency(g));
        Ok(())
    })
}

/// Rational rank from `num_primes` random primes drawn from `seed`, made
/// exact by fraction-free elimination when not full and `n <= 64`.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn corelab_rank_rational(
    g: *const CorelabGraph,
    num_primes: usize,
    seed: u64,
    out: *mut CorelabRank,
) -> CorelabStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if num_primes == 0 {
            return Err((
                CorelabStatus::InvalidArgument,
                "num_primes must be positive".into(),
            ));
        }
        let mut rng = RngStream::new(seed, tag_id("rank"));
        let cert = rational_rank(g, num_primes, &mut rng);
        let mut r = CorelabRank {
            n: g.n(),
            rank: cert.rank,
            exact: (cert.certainty == Certainty::Exact) as i32,
            failure_bound: cert.failure_bound,
        };
        if r.exact == 0 && g.n() <= DEFAULT_FRACTION_FREE_CAP {
            r.rank = fraction_free_rank(g, DEFAULT_FRACTION_FREE_CAP).map_err(lib_err)?;
            r.exact = 1;
            r.failure_bound = 0.0;
        }
        *out = r;
        Ok(())
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn corelab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
