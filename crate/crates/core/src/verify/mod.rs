//! Exhaustive and seeded-random checks of `E_n` positivity and of the exact
//! identities and inequalities between staircase functionals.
//!
//! All reports are deterministic functions of their inputs and seed: work is
//! spread over a rayon pool, but every accumulator merges associatively and
//! keeps canonically sorted lists, so the worker count never shows up in the
//! output.

mod argmin;
mod props;
mod report;
mod sampling;
mod scan;

pub use argmin::{argmin_structure, ArgminReport};
pub use props::{check_proposition, PropId};
pub use report::{Failure, PropCheckReport, ScanReport, Violation, Witness};
pub use sampling::{random_rectangles, random_staircase, seeded_rng, ScanRng, PRNG_ID};
pub use scan::{
    exhaustive_scan, multiset_count, random_scan, rectangle_scan, ScanMode, ScanOptions,
    ScanTarget, DEFAULT_BUDGET, DEFAULT_LIST_LIMIT,
};

/// Identifier stamped on every JSON report.
pub const SCHEMA: &str = "fkg-lab/report-v1";

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool
/// when `workers == 0`.
pub(crate) fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Multisets of size `k` drawn from `0..len`, as sorted index vectors in
/// lexicographic order.
pub(crate) fn multisets(len: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(len: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            cur.push(i);
            rec(len, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}
