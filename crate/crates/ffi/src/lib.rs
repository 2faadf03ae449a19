//! C ABI over `cmlhdc`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`-style
//! constructors and released with the matching `*_free`. Every fallible call
//! returns a [`CmlhdcStatus`]; on failure the message is kept per thread and
//! can be fetched with [`cmlhdc_last_error`]. Strings returned by the library
//! are owned by the caller and must be released with [`cmlhdc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cmlhdc::cml::CmlModel;
use cmlhdc::error::Error;
use cmlhdc::graph::{random_connected_graph, Graph};
use cmlhdc::harness::{run_experiment, ExperimentConfig};
use cmlhdc::hdc::{bind, Hypervector};
use cmlhdc::seed::derive_rng;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmlhdcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    OutOfRange = 4,
    Io = 5,
    Parse = 6,
    Failed = 7,
    Panic = 8,
}

pub struct CmlhdcHypervector(Hypervector);
pub struct CmlhdcGraph(Graph);
pub struct CmlhdcModel(CmlModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(CmlhdcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidDimension(_) | Error::InvalidArgument(_) | Error::DegenerateVector | Error::UnknownExperiment(_) => {
                CmlhdcStatus::InvalidArgument
            }
            Error::DimensionMismatch { .. } | Error::ShapeMismatch { .. } => CmlhdcStatus::DimensionMismatch,
            Error::OutOfRange { .. } => CmlhdcStatus::OutOfRange,
            Error::Io(_) => CmlhdcStatus::Io,
            Error::Json(_) | Error::Csv(_) => CmlhdcStatus::Parse,
            _ => CmlhdcStatus::Failed,
        };
        Failure(status, e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(CmlhdcStatus::Parse, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CmlhdcStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status plus last-error text.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CmlhdcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CmlhdcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned());
            set_error(format!("panic: {}", msg.unwrap_or_else(|| "unknown".into())));
            CmlhdcStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = value;
    Ok(())
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Failure(CmlhdcStatus::InvalidArgument, format!("{what} is not UTF-8: {e}")))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure(CmlhdcStatus::Failed, e.to_string()))?;
    write(out, c.into_raw())
}

/// Message of the last failed call on this thread, or null if none. The
/// returned string is a copy owned by the caller.
#[no_mangle]
pub extern "C" fn cmlhdc_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// # Safety
/// `s` must be null or a string returned by this library, freed only once.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Random bipolar hypervector drawn from the stream `(seed, [stream])`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_hv_random(d: usize, seed: u64, stream: u64, out: *mut *mut CmlhdcHypervector) -> CmlhdcStatus {
    guard(|| put(out, CmlhdcHypervector(Hypervector::random(d, &mut derive_rng(seed, &[stream]))?)))
}

/// Hypervector from `len` elements, each +1 or -1.
///
/// # Safety
/// `elems` must point to `len` readable bytes; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_hv_from_elements(elems: *const i8, len: usize, out: *mut *mut CmlhdcHypervector) -> CmlhdcStatus {
    guard(|| {
        if elems.is_null() {
            return Err(null("elems"));
        }
        let v = std::slice::from_raw_parts(elems, len).to_vec();
        put(out, CmlhdcHypervector(Hypervector::from_elements(v)?))
    })
}

/// # Safety
/// `hv` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_hv_dim(hv: *const CmlhdcHypervector) -> usize {
    hv.as_ref().map_or(0, |h| h.0.dim())
}

/// Copies the elements into `buf`, which must hold `dim` bytes.
///
/// # Safety
/// `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_hv_elements(hv: *const CmlhdcHypervector, buf: *mut i8, len: usize) -> CmlhdcStatus {
    guard(|| {
        let h = get(hv, "hv")?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len != h.0.dim() {
            return Err(Error::DimensionMismatch { expected: h.0.dim(), found: len }.into());
        }
        ptr::copy_nonoverlapping(h.0.as_slice().as_ptr(), buf, len);
        Ok(())
    })
}

/// # Safety
/// `a`, `b` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_hv_bind(a: *const CmlhdcHypervector, b: *const CmlhdcHypervector, out: *mut *mut CmlhdcHypervector) -> CmlhdcStatus {
    guard(|| put(out, CmlhdcHypervector(bind(&get(a, "a")?.0, &get(b, "b")?.0)?)))
}

/// Cosine similarity.
///
/// # Safety
/// `a`, `b` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_hv_similarity(a: *const CmlhdcHypervector, b: *const CmlhdcHypervector, out: *mut f64) -> CmlhdcStatus {
    guard(|| write(out, get(a, "a")?.0.similarity(&get(b, "b")?.0)?))
}

/// # Safety
/// `hv` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_hv_free(hv: *mut CmlhdcHypervector) {
    if !hv.is_null() {
        drop(Box::from_raw(hv));
    }
}

/// Random connected graph with `edges` undirected edges.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_graph_random(n: usize, edges: usize, seed: u64, out: *mut *mut CmlhdcGraph) -> CmlhdcStatus {
    guard(|| put(out, CmlhdcGraph(random_connected_graph(n, edges, &mut derive_rng(seed, &[]))?)))
}

/// Graph from `{"n": .., "edges": [[u, v], ..]}`.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_graph_from_json(json: *const c_char, out: *mut *mut CmlhdcGraph) -> CmlhdcStatus {
    guard(|| put(out, CmlhdcGraph(serde_json::from_str(read_str(json, "json")?)?)))
}

/// # Safety
/// `g` and `out` must be valid; free the result with `cmlhdc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_graph_to_json(g: *const CmlhdcGraph, out: *mut *mut c_char) -> CmlhdcStatus {
    guard(|| put_string(out, serde_json::to_string(&get(g, "graph")?.0)?))
}

/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_graph_node_count(g: *const CmlhdcGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.node_count())
}

/// Shortest hop count between two nodes.
///
/// # Safety
/// `g` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_graph_distance(g: *const CmlhdcGraph, u: usize, v: usize, out: *mut usize) -> CmlhdcStatus {
    guard(|| write(out, get(g, "graph")?.0.shortest_path_length(u, v)?))
}

/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_graph_free(g: *mut CmlhdcGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Trains a model on a copy of `g`; the graph handle stays owned by the caller.
///
/// # Safety
/// `g` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_model_train(g: *const CmlhdcGraph, d: usize, epochs: usize, seed: u64, out: *mut *mut CmlhdcModel) -> CmlhdcStatus {
    guard(|| {
        let graph = get(g, "graph")?.0.clone();
        let mut model = CmlModel::new(graph, d, &mut derive_rng(seed, &[]))?;
        model.train(epochs)?;
        put(out, CmlhdcModel(model))
    })
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_model_from_json(json: *const c_char, out: *mut *mut CmlhdcModel) -> CmlhdcStatus {
    guard(|| put(out, CmlhdcModel(CmlModel::from_json(read_str(json, "json")?)?)))
}

/// # Safety
/// `m` and `out` must be valid; free the result with `cmlhdc_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_model_to_json(m: *const CmlhdcModel, out: *mut *mut c_char) -> CmlhdcStatus {
    guard(|| put_string(out, get(m, "model")?.0.to_json()?))
}

/// Plans from `start` to `target`. `max_steps = 0` uses the default cap of
/// four times the node count. `reached` is false when the target was not hit
/// or an impermissible action was chosen.
///
/// # Safety
/// `m`, `reached` and `steps` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_model_traverse(
    m: *const CmlhdcModel,
    start: usize,
    target: usize,
    max_steps: usize,
    reached: *mut bool,
    steps: *mut usize,
) -> CmlhdcStatus {
    guard(|| {
        let m = &get(m, "model")?.0;
        let cap = if max_steps == 0 { m.default_max_steps() } else { max_steps };
        let r = m.traverse(start, &m.state_of(target)?, target, cap)?;
        write(reached, r.reached && !r.illegal_action)?;
        write(steps, r.steps_taken)
    })
}

/// Adjacency check plus random traversals; `success` is true when all pass.
///
/// # Safety
/// `m` and `success` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_model_evaluate(m: *const CmlhdcModel, seed: u64, success: *mut bool) -> CmlhdcStatus {
    guard(|| write(success, get(m, "model")?.0.evaluate(&mut derive_rng(seed, &[]))?.success()))
}

/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_model_free(m: *mut CmlhdcModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Runs an experiment from a JSON config (same schema as the CLI's
/// `--config`) and returns the result record as JSON.
///
/// # Safety
/// `config_json` must be a nul-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cmlhdc_run_experiment(config_json: *const c_char, out: *mut *mut c_char) -> CmlhdcStatus {
    guard(|| {
        let cfg: ExperimentConfig = serde_json::from_str(read_str(config_json, "config_json")?)?;
        let record = run_experiment(&cfg)?;
        put_string(out, serde_json::to_string(&record)?)
    })
}
