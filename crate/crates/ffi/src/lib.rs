//! C ABI over the `spex` library.
//!
//! Every entry point returns a [`SpexStatus`]; on failure a message is kept
//! per thread and can be read with [`spex_last_error`]. Objects handed out
//! through `out` pointers are owned by the caller and released with the
//! matching `*_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use spex::algorithms::{
    build_graph, cart_fit, emn_fit, imm_fit, spex_fit_graph, CentroidNorm, GraphSource,
};
use spex::data::{kmeans_fit, Dataset, ReferenceClustering};
use spex::graph::KnnWeightMode;
use spex::tree::ExplainTree;
use spex::SpexError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpexStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LabelMismatch = 3,
    MissingCentroids = 4,
    MalformedTree = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpexAlgorithm {
    SpexClique = 0,
    SpexKnn = 1,
    Cart = 2,
    Imm = 3,
    Emn = 4,
}

/// Options for [`spex_fit`]. Zero `leaves` means one leaf per reference
/// cluster. Without labels, a positive `kmeans_k` builds the reference with
/// k-means (`restarts`, `seed`).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SpexFitOptions {
    pub algorithm: SpexAlgorithm,
    pub leaves: usize,
    pub kappa: usize,
    /// IMM diametrical pairs under l1 instead of l2.
    pub l1_norm: bool,
    pub kmeans_k: usize,
    pub restarts: usize,
    pub seed: u64,
}

/// Opaque point set.
pub struct SpexDataset(Dataset);

/// Opaque fitted tree.
pub struct SpexTree(ExplainTree);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &SpexError) -> SpexStatus {
    match e {
        SpexError::Io { .. } | SpexError::Parse { .. } => SpexStatus::Io,
        SpexError::LabelCountMismatch { .. } => SpexStatus::LabelMismatch,
        SpexError::MissingCentroids(_) => SpexStatus::MissingCentroids,
        SpexError::MalformedTree(_) => SpexStatus::MalformedTree,
        _ => SpexStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (SpexStatus, String)>) -> SpexStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SpexStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SpexStatus::Panic
        }
    }
}

fn lift<T>(r: spex::Result<T>) -> Result<T, (SpexStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (SpexStatus, String) {
    (SpexStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a, T>(
    p: *const T,
    len: usize,
    what: &str,
) -> Result<&'a [T], (SpexStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Message of the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn spex_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Copies `n * d` row-major values into a new dataset.
///
/// # Safety
/// `values` must point to `n * d` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spex_dataset_new(
    values: *const f64,
    n: usize,
    d: usize,
    out: *mut *mut SpexDataset,
) -> SpexStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let len = n
            .checked_mul(d)
            .ok_or((SpexStatus::InvalidArgument, "n * d overflows".to_string()))?;
        let v = slice(values, len, "values")?;
        let ds = lift(Dataset::new(v.to_vec(), n, d))?;
        *out = Box::into_raw(Box::new(SpexDataset(ds)));
        Ok(())
    })
}

/// # Safety
/// `ds` must come from [`spex_dataset_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn spex_dataset_free(ds: *mut SpexDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// # Safety
/// `ds` must be a live dataset or null.
#[no_mangle]
pub unsafe extern "C" fn spex_dataset_n(ds: *const SpexDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.n())
}

/// # Safety
/// `ds` must be a live dataset or null.
#[no_mangle]
pub unsafe extern "C" fn spex_dataset_d(ds: *const SpexDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.d())
}

fn fit_tree(
    ds: &Dataset,
    labels: Option<&[usize]>,
    opts: &SpexFitOptions,
) -> spex::Result<ExplainTree> {
    let reference = match labels {
        Some(l) => {
            let k = l.iter().max().map_or(0, |m| m + 1);
            if l.len() != ds.n() {
                return Err(SpexError::LabelCountMismatch {
                    labels: l.len(),
                    points: ds.n(),
                });
            }
            Some(ReferenceClustering::new(l.to_vec(), k)?)
        }
        None if opts.kmeans_k > 0 => Some(kmeans_fit(
            ds,
            opts.kmeans_k,
            opts.restarts.max(1),
            opts.seed,
            300,
        )?),
        None => None,
    };
    let name = match opts.algorithm {
        SpexAlgorithm::SpexClique => "SpEx-clique",
        SpexAlgorithm::SpexKnn => "SpEx-kNN",
        SpexAlgorithm::Cart => "CART",
        SpexAlgorithm::Imm => "IMM",
        SpexAlgorithm::Emn => "EMN",
    };
    if reference.is_none() && opts.algorithm != SpexAlgorithm::SpexKnn {
        return Err(SpexError::MissingCentroids(format!(
            "{name} requires a centroid-bearing reference"
        )));
    }
    let leaves = match (opts.leaves, &reference) {
        (0, Some(r)) => r.k(),
        (0, None) => {
            return Err(SpexError::InvalidArgument(
                "leaves is required without a reference".into(),
            ))
        }
        (l, _) => l,
    };
    let need = || reference.as_ref().expect("checked above");
    let with_centroids = |r: &ReferenceClustering| -> spex::Result<ReferenceClustering> {
        if r.centroids().is_some() {
            Ok(r.clone())
        } else {
            r.clone().with_mean_centroids(ds)
        }
    };
    let fit = match opts.algorithm {
        SpexAlgorithm::SpexClique => {
            let g = build_graph(ds, GraphSource::Clique(need()))?;
            spex_fit_graph(ds, &g, leaves)?
        }
        SpexAlgorithm::SpexKnn => {
            let g = build_graph(
                ds,
                GraphSource::Knn {
                    kappa: opts.kappa,
                    mode: KnnWeightMode::IndicatorSum,
                },
            )?;
            spex_fit_graph(ds, &g, leaves)?
        }
        SpexAlgorithm::Cart => cart_fit(ds, need(), leaves)?,
        SpexAlgorithm::Imm => {
            let norm = if opts.l1_norm {
                CentroidNorm::L1
            } else {
                CentroidNorm::L2
            };
            imm_fit(ds, &with_centroids(need())?, norm)?.fit
        }
        SpexAlgorithm::Emn => emn_fit(ds, &with_centroids(need())?)?.fit,
    };
    Ok(fit.tree)
}

/// Fits a tree. `labels` may be null (with `labels_len` 0) when
/// `opts.kmeans_k` is positive or the algorithm is the kNN variant.
///
/// # Safety
/// `ds` must be live; `labels` must point to `labels_len` readable values;
/// `opts` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn spex_fit(
    ds: *const SpexDataset,
    labels: *const usize,
    labels_len: usize,
    opts: *const SpexFitOptions,
    out: *mut *mut SpexTree,
) -> SpexStatus {
    guard(|| {
        let ds = ds.as_ref().ok_or_else(|| null("ds"))?;
        let opts = opts.as_ref().ok_or_else(|| null("opts"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let labels = if labels.is_null() && labels_len == 0 {
            None
        } else {
            Some(slice(labels, labels_len, "labels")?)
        };
        let tree = lift(fit_tree(&ds.0, labels, opts))?;
        *out = Box::into_raw(Box::new(SpexTree(tree)));
        Ok(())
    })
}

/// # Safety
/// `tree` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn spex_tree_free(tree: *mut SpexTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// # Safety
/// `tree` must be a live tree or null.
#[no_mangle]
pub unsafe extern "C" fn spex_tree_leaf_count(tree: *const SpexTree) -> usize {
    tree.as_ref().map_or(0, |t| t.0.leaf_count())
}

/// Writes the cluster of every row of `ds` into `out` (`out_len >= n`).
///
/// # Safety
/// `tree`, `ds` must be live; `out` must point to `out_len` writable values.
#[no_mangle]
pub unsafe extern "C" fn spex_tree_assign(
    tree: *const SpexTree,
    ds: *const SpexDataset,
    out: *mut usize,
    out_len: usize,
) -> SpexStatus {
    guard(|| {
        let tree = tree.as_ref().ok_or_else(|| null("tree"))?;
        let ds = ds.as_ref().ok_or_else(|| null("ds"))?;
        let labels = lift(tree.0.assign(&ds.0))?;
        if out_len < labels.len() {
            return Err((
                SpexStatus::InvalidArgument,
                format!("output holds {out_len} values, need {}", labels.len()),
            ));
        }
        if out.is_null() && !labels.is_empty() {
            return Err(null("out"));
        }
        if !labels.is_empty() {
            std::slice::from_raw_parts_mut(out, labels.len()).copy_from_slice(&labels);
        }
        Ok(())
    })
}

/// Serializes a tree; release the string with [`spex_string_free`].
///
/// # Safety
/// `tree` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spex_tree_to_json(
    tree: *const SpexTree,
    out: *mut *mut c_char,
) -> SpexStatus {
    guard(|| {
        let tree = tree.as_ref().ok_or_else(|| null("tree"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = CString::new(tree.0.to_json()).expect("json has no nul");
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn spex_tree_from_json(
    json: *const c_char,
    out: *mut *mut SpexTree,
) -> SpexStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (SpexStatus::MalformedTree, e.to_string()))?;
        let tree = lift(ExplainTree::from_json(text))?;
        *out = Box::into_raw(Box::new(SpexTree(tree)));
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn spex_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn agreement(
    a: *const usize,
    b: *const usize,
    n: usize,
    out: *mut f64,
    f: fn(&[usize], &[usize]) -> spex::Result<f64>,
) -> SpexStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let (a, b) = (slice(a, n, "a")?, slice(b, n, "b")?);
        *out = lift(f(a, b))?;
        Ok(())
    })
}

/// Adjusted Rand index of two labelings of `n` points.
///
/// # Safety
/// `a` and `b` must point to `n` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spex_ari(
    a: *const usize,
    b: *const usize,
    n: usize,
    out: *mut f64,
) -> SpexStatus {
    agreement(a, b, n, out, spex::metrics::ari)
}

/// Adjusted mutual information of two labelings of `n` points.
///
/// # Safety
/// `a` and `b` must point to `n` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn spex_ami(
    a: *const usize,
    b: *const usize,
    n: usize,
    out: *mut f64,
) -> SpexStatus {
    agreement(a, b, n, out, spex::metrics::ami)
}

#[doc(hidden)]
pub fn last_error_string() -> String {
    LAST_ERROR.with(|e| e.borrow().to_string_lossy().into_owned())
}
