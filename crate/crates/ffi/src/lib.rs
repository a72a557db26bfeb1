//! C ABI over the streamdecomp partitioners.
//!
//! Graphs and hypergraphs are opaque handles created by `sd_*_new` or
//! `sd_*_read_*` and released with the matching `sd_*_free`. Every fallible
//! call returns an `SdStatus`; on failure `sd_last_error` describes the most
//! recent error of the calling thread. Node ids are 0-based.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use streamdecomp::cli::{run_graph_job, run_graph_job_parallel, run_hyper_job, GraphAlgorithm, GraphJob, HyperAlgorithm, HyperJob};
use streamdecomp::freight::Objective;
use streamdecomp::heistream::ModelKind;
use streamdecomp::metrics::{self, QualityReport};
use streamdecomp::multisection::HierarchySpec;
use streamdecomp::{io, CsrGraph, Error, Hypergraph};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Invariant = 5,
    Panic = 6,
}

pub const SD_ALGORITHM_HASHING: u32 = 0;
pub const SD_ALGORITHM_LDG: u32 = 1;
pub const SD_ALGORITHM_FENNEL: u32 = 2;
pub const SD_ALGORITHM_HEISTREAM: u32 = 3;
pub const SD_ALGORITHM_OMS: u32 = 4;

pub const SD_OBJECTIVE_CONNECTIVITY: u32 = 0;
pub const SD_OBJECTIVE_CUT_NET: u32 = 1;

/// Marks an absent metric in `SdReport`.
pub const SD_NONE: u64 = u64::MAX;

/// Opaque in-memory graph.
pub struct SdGraph(CsrGraph);

/// Opaque in-memory hypergraph.
pub struct SdHypergraph(Hypergraph);

/// Parameters of a graph partitioning run. Fill with
/// `sd_partition_options_default` and override what you need.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SdPartitionOptions {
    /// One of `SD_ALGORITHM_*`.
    pub algorithm: u32,
    pub k: u32,
    pub epsilon: f64,
    pub seed: u64,
    pub gamma: f64,
    /// Fennel α; values ≤ 0 select the default computed from n, m and k.
    pub alpha: f64,
    pub passes: u32,
    pub alpha_growth: f64,
    /// Multi-section tree fan-out for OMS without a hierarchy.
    pub base: u32,
    /// HeiStream batch size.
    pub delta: u64,
    /// HeiStream: nonzero selects the extended model.
    pub extended_model: u32,
    pub x: u32,
    /// OMS: number of bottom layers assigned by hashing.
    pub hash_bottom_layers: u32,
}

/// Quality of a partition. Absent values are `SD_NONE`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SdReport {
    pub edge_cut: u64,
    pub cut_net: u64,
    pub connectivity: u64,
    pub comm_cost: u64,
    pub imbalance: f64,
    pub max_block_weight: u64,
    pub l_max: u64,
    pub balance_violations: u64,
    /// α used by the scorer, or 0.
    pub alpha: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SdStatus {
    match e {
        Error::Config(_) | Error::HierarchyMismatch { .. } | Error::Unassigned(_) => SdStatus::InvalidArgument,
        Error::Invariant(_) => SdStatus::Invariant,
        Error::Io { .. } | Error::Csv(_) | Error::Json(_) => SdStatus::Io,
        _ => SdStatus::Parse,
    }
}

enum Fail {
    Null(&'static str),
    Arg(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SdStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("{what} is null"));
            SdStatus::NullPointer
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_error(msg);
            SdStatus::InvalidArgument
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            SdStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn opt_slice<'a, T>(p: *const T, len: usize) -> Option<&'a [T]> {
    (!p.is_null()).then(|| std::slice::from_raw_parts(p, len))
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, Fail> {
    if path.is_null() {
        return Err(Fail::Null("path"));
    }
    let s = CStr::from_ptr(path)
        .to_str()
        .map_err(|_| Fail::Arg("path is not valid UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

unsafe fn fill_report(out: *mut SdReport, r: &QualityReport, violations: u64, alpha: Option<f64>) {
    if out.is_null() {
        return;
    }
    let report = SdReport {
        edge_cut: r.edge_cut.unwrap_or(SD_NONE),
        cut_net: r.cut_net.unwrap_or(SD_NONE),
        connectivity: r.connectivity.unwrap_or(SD_NONE),
        comm_cost: r.comm_cost.unwrap_or(SD_NONE),
        imbalance: r.imbalance,
        max_block_weight: r.max_block_weight,
        l_max: r.l_max,
        balance_violations: violations,
        alpha: alpha.unwrap_or(0.0),
    };
    *out = report;
}

/// Last error message of the calling thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a graph from CSR arrays. `xadj` has `n + 1` entries and
/// `adjncy` lists every edge in both directions. `vwgt` (length `n`) and
/// `adjwgt` (length `xadj[n]`) may be null for unit weights.
///
/// # Safety
/// All non-null pointers must be valid for the stated lengths; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_graph_new(
    n: usize,
    xadj: *const u64,
    adjncy: *const u32,
    vwgt: *const u64,
    adjwgt: *const u64,
    out: *mut *mut SdGraph,
) -> SdStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let xadj = slice(xadj, n + 1, "xadj")?;
        let arcs = xadj[n] as usize;
        let adjncy = slice(adjncy, arcs, "adjncy")?;
        let g = CsrGraph::from_csr(
            xadj.iter().map(|&x| x as usize).collect(),
            adjncy.to_vec(),
            opt_slice(vwgt, n).map(<[u64]>::to_vec),
            opt_slice(adjwgt, arcs).map(<[u64]>::to_vec),
        )?;
        write_out(out, SdGraph(g));
        Ok(())
    })
}

/// Reads a METIS graph file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_graph_read_metis(path: *const c_char, out: *mut *mut SdGraph) -> SdStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let g = io::read_metis(path_arg(path)?)?;
        write_out(out, SdGraph(g));
        Ok(())
    })
}

/// # Safety
/// `g` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sd_graph_free(g: *mut SdGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sd_graph_num_nodes(g: *const SdGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// # Safety
/// `g` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sd_graph_num_edges(g: *const SdGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.m())
}

/// Builds a hypergraph from net-major arrays: net `e` holds the pins
/// `pins[eptr[e]..eptr[e+1]]`. `vwgt` (length `n`) and `ewgt` (length `m`)
/// may be null.
///
/// # Safety
/// All non-null pointers must be valid for the stated lengths; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_hypergraph_new(
    n: usize,
    m: usize,
    eptr: *const u64,
    pins: *const u32,
    vwgt: *const u64,
    ewgt: *const u64,
    out: *mut *mut SdHypergraph,
) -> SdStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let eptr = slice(eptr, m + 1, "eptr")?;
        if eptr.windows(2).any(|w| w[0] > w[1]) {
            return Err(Fail::Arg("eptr must be nondecreasing".into()));
        }
        let pins = slice(pins, eptr[m] as usize, "pins")?;
        let nets: Vec<Vec<u32>> = eptr
            .windows(2)
            .map(|w| pins[w[0] as usize..w[1] as usize].to_vec())
            .collect();
        let h = Hypergraph::from_nets(
            n,
            &nets,
            opt_slice(ewgt, m).map(<[u64]>::to_vec),
            opt_slice(vwgt, n).map(<[u64]>::to_vec),
        )?;
        write_out(out, SdHypergraph(h));
        Ok(())
    })
}

/// Reads an hMetis (net-major) file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_hypergraph_read_hmetis(path: *const c_char, out: *mut *mut SdHypergraph) -> SdStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let h = io::read_hmetis(path_arg(path)?)?;
        write_out(out, SdHypergraph(h));
        Ok(())
    })
}

/// Reads a node-major hypergraph file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_hypergraph_read_node_major(path: *const c_char, out: *mut *mut SdHypergraph) -> SdStatus {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let h = io::read_node_major(path_arg(path)?)?;
        write_out(out, SdHypergraph(h));
        Ok(())
    })
}

/// # Safety
/// `h` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sd_hypergraph_free(h: *mut SdHypergraph) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sd_hypergraph_num_nodes(h: *const SdHypergraph) -> usize {
    h.as_ref().map_or(0, |h| h.0.n())
}

/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sd_hypergraph_num_nets(h: *const SdHypergraph) -> usize {
    h.as_ref().map_or(0, |h| h.0.m())
}

/// # Safety
/// `opts` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sd_partition_options_default(opts: *mut SdPartitionOptions) {
    let Some(opts) = opts.as_mut() else { return };
    let job = GraphJob::new(GraphAlgorithm::Fennel, 2);
    *opts = SdPartitionOptions {
        algorithm: SD_ALGORITHM_FENNEL,
        k: job.k,
        epsilon: job.epsilon,
        seed: job.seed,
        gamma: job.gamma,
        alpha: 0.0,
        passes: job.passes,
        alpha_growth: job.alpha_growth,
        base: job.base,
        delta: job.delta as u64,
        extended_model: 1,
        x: job.x,
        hash_bottom_layers: job.hash_bottom_layers,
    };
}

fn job_of(o: &SdPartitionOptions) -> Result<GraphJob, Fail> {
    let algorithm = match o.algorithm {
        SD_ALGORITHM_HASHING => GraphAlgorithm::Hashing,
        SD_ALGORITHM_LDG => GraphAlgorithm::Ldg,
        SD_ALGORITHM_FENNEL => GraphAlgorithm::Fennel,
        SD_ALGORITHM_HEISTREAM => GraphAlgorithm::Heistream,
        SD_ALGORITHM_OMS => GraphAlgorithm::Oms,
        other => return Err(Fail::Arg(format!("unknown algorithm {other}"))),
    };
    Ok(GraphJob {
        epsilon: o.epsilon,
        seed: o.seed,
        gamma: o.gamma,
        alpha: (o.alpha > 0.0).then_some(o.alpha),
        passes: o.passes,
        alpha_growth: o.alpha_growth,
        base: o.base,
        delta: o.delta as usize,
        model: if o.extended_model != 0 { ModelKind::Extended } else { ModelKind::Basic },
        x: o.x,
        hash_bottom_layers: o.hash_bottom_layers,
        ..GraphJob::new(algorithm, o.k)
    })
}

/// Partitions `g` into `opts->k` blocks. `assignment` receives one block
/// id per node; `report` may be null.
///
/// # Safety
/// `g` and `opts` must be valid; `assignment` must hold `n` entries.
#[no_mangle]
pub unsafe extern "C" fn sd_partition_graph(
    g: *const SdGraph,
    opts: *const SdPartitionOptions,
    assignment: *mut u32,
    report: *mut SdReport,
) -> SdStatus {
    guard(|| {
        let g = &g.as_ref().ok_or(Fail::Null("graph"))?.0;
        let opts = opts.as_ref().ok_or(Fail::Null("options"))?;
        if assignment.is_null() {
            return Err(Fail::Null("assignment"));
        }
        let job = job_of(opts)?;
        let out = run_graph_job(&mut g.stream(), &job, None)?;
        let r = metrics::graph_report(&mut g.stream(), &out.state.assignment, job.k, job.epsilon, None)?;
        std::slice::from_raw_parts_mut(assignment, g.n()).copy_from_slice(&out.state.assignment);
        fill_report(report, &r, out.state.balance_violations, out.alpha);
        Ok(())
    })
}

/// Maps `g` onto the hierarchy `fanouts[0..layers]` (innermost first) with
/// per-layer `distances`. `opts->k` is ignored; k is the product of the
/// fan-outs. `opts->algorithm` selects OMS or a flat partitioner whose
/// block `i` becomes PE `i`. `threads > 1` runs OMS node-parallel.
///
/// # Safety
/// Pointers must be valid; `assignment` must hold `n` entries.
#[no_mangle]
pub unsafe extern "C" fn sd_map_graph(
    g: *const SdGraph,
    fanouts: *const u32,
    distances: *const u64,
    layers: usize,
    opts: *const SdPartitionOptions,
    threads: u32,
    assignment: *mut u32,
    report: *mut SdReport,
) -> SdStatus {
    guard(|| {
        let g = &g.as_ref().ok_or(Fail::Null("graph"))?.0;
        let opts = opts.as_ref().ok_or(Fail::Null("options"))?;
        if assignment.is_null() {
            return Err(Fail::Null("assignment"));
        }
        let spec = HierarchySpec::new(
            slice(fanouts, layers, "fanouts")?.to_vec(),
            slice(distances, layers, "distances")?.to_vec(),
        )?;
        let job = GraphJob {
            k: spec.k(),
            ..job_of(opts)?
        };
        let out = if threads > 1 {
            run_graph_job_parallel(g, &job, Some(&spec), threads as usize)?
        } else {
            run_graph_job(&mut g.stream(), &job, Some(&spec))?
        };
        let r = metrics::graph_report(&mut g.stream(), &out.state.assignment, job.k, job.epsilon, Some(&spec))?;
        std::slice::from_raw_parts_mut(assignment, g.n()).copy_from_slice(&out.state.assignment);
        fill_report(report, &r, out.state.balance_violations, out.alpha);
        Ok(())
    })
}

/// Streams `h` through FREIGHT with one of `SD_OBJECTIVE_*`. `alpha ≤ 0`
/// selects the default.
///
/// # Safety
/// `h` must be valid; `assignment` must hold `n` entries.
#[no_mangle]
pub unsafe extern "C" fn sd_freight(
    h: *const SdHypergraph,
    k: u32,
    epsilon: f64,
    objective: u32,
    alpha: f64,
    assignment: *mut u32,
    report: *mut SdReport,
) -> SdStatus {
    guard(|| {
        let h = &h.as_ref().ok_or(Fail::Null("hypergraph"))?.0;
        if assignment.is_null() {
            return Err(Fail::Null("assignment"));
        }
        let objective = match objective {
            SD_OBJECTIVE_CONNECTIVITY => Objective::Connectivity,
            SD_OBJECTIVE_CUT_NET => Objective::CutNet,
            other => return Err(Fail::Arg(format!("unknown objective {other}"))),
        };
        let job = HyperJob {
            epsilon,
            alpha: (alpha > 0.0).then_some(alpha),
            ..HyperJob::new(HyperAlgorithm::Freight, objective, k)
        };
        let out = run_hyper_job(&mut h.stream(), &job)?;
        let r = metrics::hypergraph_report(&mut h.stream(), &out.state.assignment, k, epsilon)?;
        std::slice::from_raw_parts_mut(assignment, h.n()).copy_from_slice(&out.state.assignment);
        fill_report(report, &r, out.state.balance_violations, out.alpha);
        Ok(())
    })
}

/// Quality of an existing graph partition. With `layers > 0` the
/// communication cost on that hierarchy is included.
///
/// # Safety
/// `assignment` must hold `n` entries; hierarchy arrays hold `layers`.
#[no_mangle]
pub unsafe extern "C" fn sd_graph_metrics(
    g: *const SdGraph,
    assignment: *const u32,
    k: u32,
    epsilon: f64,
    fanouts: *const u32,
    distances: *const u64,
    layers: usize,
    report: *mut SdReport,
) -> SdStatus {
    guard(|| {
        let g = &g.as_ref().ok_or(Fail::Null("graph"))?.0;
        if report.is_null() {
            return Err(Fail::Null("report"));
        }
        let a = slice(assignment, g.n(), "assignment")?;
        check_blocks(a, k, epsilon)?;
        let spec = if layers > 0 {
            let s = HierarchySpec::new(
                slice(fanouts, layers, "fanouts")?.to_vec(),
                slice(distances, layers, "distances")?.to_vec(),
            )?;
            s.check_k(k)?;
            Some(s)
        } else {
            None
        };
        let r = metrics::graph_report(&mut g.stream(), a, k, epsilon, spec.as_ref())?;
        fill_report(report, &r, 0, None);
        Ok(())
    })
}

/// Quality of an existing hypergraph partition.
///
/// # Safety
/// `assignment` must hold `n` entries.
#[no_mangle]
pub unsafe extern "C" fn sd_hypergraph_metrics(
    h: *const SdHypergraph,
    assignment: *const u32,
    k: u32,
    epsilon: f64,
    report: *mut SdReport,
) -> SdStatus {
    guard(|| {
        let h = &h.as_ref().ok_or(Fail::Null("hypergraph"))?.0;
        if report.is_null() {
            return Err(Fail::Null("report"));
        }
        let a = slice(assignment, h.n(), "assignment")?;
        check_blocks(a, k, epsilon)?;
        let r = metrics::hypergraph_report(&mut h.stream(), a, k, epsilon)?;
        fill_report(report, &r, 0, None);
        Ok(())
    })
}

fn check_blocks(a: &[u32], k: u32, epsilon: f64) -> Result<(), Fail> {
    if k == 0 {
        return Err(Fail::Arg("k must be at least 1".into()));
    }
    if !(epsilon >= 0.0) {
        return Err(Fail::Arg("epsilon must be nonnegative".into()));
    }
    if let Some(b) = a.iter().find(|&&b| b >= k) {
        return Err(Fail::Arg(format!("block id {b} not below k = {k}")));
    }
    Ok(())
}
