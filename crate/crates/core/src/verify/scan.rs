use std::time::Instant;

use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{en_partition, kappa3, RectangleOracle, StaircaseOracle};
use crate::error::{Error, Result};
use crate::lattice::{RectangleFamily, StaircaseSeq};
use crate::rational::Rational;

use super::report::{ScanReport, Violation, Witness};
use super::sampling::{random_rectangles, random_staircase, seeded_rng};
use super::{multisets, with_workers};

/// Refuse any enumeration larger than this many evaluations by default.
pub const DEFAULT_BUDGET: u64 = 1_000_000;
/// Entries kept in each report list by default.
pub const DEFAULT_LIST_LIMIT: usize = 32;
/// Corner grid for random rectangles: coordinates are multiples of 1/12.
const RECT_DENOMINATOR: i64 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    Exhaustive,
    Random,
    Rectangle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanTarget {
    En,
    Kappa3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanOptions {
    pub budget: u64,
    /// Worker threads; 0 uses the global rayon pool.
    pub workers: usize,
    pub list_limit: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            budget: DEFAULT_BUDGET,
            workers: 0,
            list_limit: DEFAULT_LIST_LIMIT,
        }
    }
}

/// `C(len + k − 1, k)`, the number of size-`k` multisets from `len` items.
pub fn multiset_count(len: usize, k: usize) -> u128 {
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c * (len as u128 + i) / (i + 1);
    }
    c
}

pub(crate) fn check_budget(needed: u128, budget: u64) -> Result<()> {
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded {
            needed,
            budget: budget as u128,
        });
    }
    Ok(())
}

/// Keeps `xs` sorted and at most `limit` long after inserting `x`.
pub(crate) fn insert_bounded<T: Ord>(xs: &mut Vec<T>, x: T, limit: usize) {
    let pos = xs.binary_search(&x).unwrap_or_else(|p| p);
    if pos < limit {
        xs.insert(pos, x);
        xs.truncate(limit);
    }
}

fn merge_bounded<T: Ord>(mut a: Vec<T>, b: Vec<T>, limit: usize) -> Vec<T> {
    a.extend(b);
    a.sort();
    a.truncate(limit);
    a
}

/// Running minimum, argmin set and violations. `merge` is associative and
/// commutative, which is what makes reports independent of scheduling.
#[derive(Clone, Debug)]
struct Acc {
    limit: usize,
    evaluated: u64,
    min: Option<Rational>,
    argmin_count: u64,
    argmin: Vec<Witness>,
    violation_count: u64,
    violations: Vec<Violation>,
}

impl Acc {
    fn new(limit: usize) -> Self {
        Acc {
            limit,
            evaluated: 0,
            min: None,
            argmin_count: 0,
            argmin: Vec::new(),
            violation_count: 0,
            violations: Vec::new(),
        }
    }

    fn push(mut self, witness: Witness, value: Rational) -> Self {
        self.evaluated += 1;
        if value.is_negative() {
            self.violation_count += 1;
            insert_bounded(
                &mut self.violations,
                Violation {
                    witness: witness.clone(),
                    value: value.clone(),
                },
                self.limit,
            );
        }
        match &self.min {
            Some(min) if value > *min => {}
            Some(min) if value == *min => {
                self.argmin_count += 1;
                insert_bounded(&mut self.argmin, witness, self.limit);
            }
            _ => {
                self.min = Some(value);
                self.argmin_count = 1;
                self.argmin = vec![witness];
            }
        }
        self
    }

    fn merge(self, other: Acc) -> Acc {
        let limit = self.limit;
        let (min, argmin_count, argmin) = match (self.min, other.min) {
            (None, m) => (m, other.argmin_count, other.argmin),
            (m, None) => (m, self.argmin_count, self.argmin),
            (Some(a), Some(b)) => {
                if a < b {
                    (Some(a), self.argmin_count, self.argmin)
                } else if b < a {
                    (Some(b), other.argmin_count, other.argmin)
                } else {
                    (
                        Some(a),
                        self.argmin_count + other.argmin_count,
                        merge_bounded(self.argmin, other.argmin, limit),
                    )
                }
            }
        };
        Acc {
            limit,
            evaluated: self.evaluated + other.evaluated,
            min,
            argmin_count,
            argmin,
            violation_count: self.violation_count + other.violation_count,
            violations: merge_bounded(self.violations, other.violations, limit),
        }
    }
}

fn evaluate_staircases(target: ScanTarget, seqs: Vec<StaircaseSeq>) -> Result<Rational> {
    let oracle = StaircaseOracle::new(seqs)?;
    match target {
        ScanTarget::En => Ok(en_partition(&oracle)?.value),
        ScanTarget::Kappa3 => kappa3(&oracle),
    }
}

fn run<I>(
    items: Vec<I>,
    opts: &ScanOptions,
    eval: impl Fn(I) -> Result<(Witness, Rational)> + Sync,
) -> Result<Acc>
where
    I: Send,
{
    let limit = opts.list_limit.max(1);
    with_workers(opts.workers, || {
        items
            .into_par_iter()
            .map(&eval)
            .try_fold(|| Acc::new(limit), |acc, r| r.map(|(w, v)| acc.push(w, v)))
            .try_reduce(|| Acc::new(limit), |a, b| Ok(a.merge(b)))
    })
}

fn check_target(target: ScanTarget, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if target == ScanTarget::Kappa3 && n != 3 {
        return Err(Error::InvalidArgument("kappa3 scans need n = 3".into()));
    }
    Ok(())
}

fn finish(
    acc: Acc,
    mode: ScanMode,
    target: ScanTarget,
    (m, k, n): (Option<usize>, Option<usize>, usize),
    seed: Option<u64>,
    tuple_count: u64,
    started: Instant,
) -> ScanReport {
    ScanReport {
        mode,
        target,
        m,
        k,
        n,
        seed,
        tuple_count,
        evaluated: acc.evaluated,
        min_value: acc.min.unwrap_or_default(),
        argmin_count: acc.argmin_count,
        argmin: acc.argmin,
        violation_count: acc.violation_count,
        violations: acc.violations,
        elapsed: started.elapsed(),
    }
}

/// Evaluates the target on every multiset of `n` elements of `A(m)`.
///
/// `E_n` and `κ_3` are symmetric, so sorted tuples cover all `|A(m)|^n`
/// ordered ones. Refuses with [`Error::BudgetExceeded`] rather than
/// truncating.
pub fn exhaustive_scan(
    m: usize,
    n: usize,
    target: ScanTarget,
    opts: &ScanOptions,
) -> Result<ScanReport> {
    let started = Instant::now();
    check_target(target, n)?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let all = StaircaseSeq::all(m);
    check_budget(multiset_count(all.len(), n), opts.budget)?;
    let tuples = multisets(all.len(), n);
    let acc = run(tuples, opts, |idx| {
        let seqs: Vec<StaircaseSeq> = idx.iter().map(|&i| all[i].clone()).collect();
        let value = evaluate_staircases(target, seqs.clone())?;
        Ok((Witness::Staircases(seqs), value))
    })?;
    let tuple_count = (all.len() as u64).saturating_pow(n as u32);
    Ok(finish(
        acc,
        ScanMode::Exhaustive,
        target,
        (Some(m), None, n),
        None,
        tuple_count,
        started,
    ))
}

/// `E_n` on `trials` seeded uniform random tuples from `A(m)`.
pub fn random_scan(
    m: usize,
    n: usize,
    trials: u64,
    seed: u64,
    opts: &ScanOptions,
) -> Result<ScanReport> {
    let started = Instant::now();
    check_target(ScanTarget::En, n)?;
    if m == 0 || trials == 0 {
        return Err(Error::InvalidArgument(
            "m and trials must be at least 1".into(),
        ));
    }
    check_budget(trials as u128, opts.budget)?;
    let mut rng = seeded_rng(seed);
    let tuples: Vec<Vec<StaircaseSeq>> = (0..trials)
        .map(|_| {
            let mut t: Vec<StaircaseSeq> = (0..n).map(|_| random_staircase(m, &mut rng)).collect();
            t.sort();
            t
        })
        .collect();
    let acc = run(tuples, opts, |seqs| {
        let value = evaluate_staircases(ScanTarget::En, seqs.clone())?;
        Ok((Witness::Staircases(seqs), value))
    })?;
    Ok(finish(
        acc,
        ScanMode::Random,
        ScanTarget::En,
        (Some(m), None, n),
        Some(seed),
        trials,
        started,
    ))
}

/// `E_n` on `trials` seeded random families of `n` down-rectangles in
/// `[0,1]^k` (corners on the 1/12 grid).
pub fn rectangle_scan(
    k: usize,
    n: usize,
    trials: u64,
    seed: u64,
    opts: &ScanOptions,
) -> Result<ScanReport> {
    let started = Instant::now();
    check_target(ScanTarget::En, n)?;
    if k == 0 || trials == 0 {
        return Err(Error::InvalidArgument(
            "k and trials must be at least 1".into(),
        ));
    }
    check_budget(trials as u128, opts.budget)?;
    let mut rng = seeded_rng(seed);
    let families: Vec<RectangleFamily> = (0..trials)
        .map(|_| {
            let fam = random_rectangles(k, n, RECT_DENOMINATOR, &mut rng);
            let mut rects = fam.rects().to_vec();
            rects.sort();
            RectangleFamily::new(k, rects).expect("same corners")
        })
        .collect();
    let acc = run(families, opts, |fam| {
        let value = en_partition(&RectangleOracle::new(fam.clone())?)?.value;
        Ok((Witness::Rectangles(fam), value))
    })?;
    Ok(finish(
        acc,
        ScanMode::Rectangle,
        ScanTarget::En,
        (None, Some(k), n),
        Some(seed),
        trials,
        started,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn s(m: usize, v: &[usize]) -> StaircaseSeq {
        StaircaseSeq::new(m, v.to_vec()).unwrap()
    }

    #[test]
    fn multiset_counts() {
        assert_eq!(multiset_count(20, 3), 1540);
        assert_eq!(multiset_count(6, 4), 126);
        assert_eq!(multiset_count(5, 1), 5);
        assert_eq!(multisets(6, 4).len(), 126);
    }

    #[test]
    fn small_exhaustive_scans() {
        let opts = ScanOptions::default();
        let r = exhaustive_scan(2, 3, ScanTarget::En, &opts).unwrap();
        assert_eq!(r.evaluated, 56);
        assert_eq!(r.tuple_count, 216);
        assert_eq!(r.min_value, int(0));
        assert!(r.violations.is_empty());

        let k = exhaustive_scan(2, 3, ScanTarget::Kappa3, &opts).unwrap();
        assert!(k.min_value <= rat(-3, 32));
        assert!(k.violation_count > 0);
        let a = s(2, &[2, 1]);
        assert!(k.violations.iter().any(|v| v.witness
            == Witness::Staircases(vec![a.clone(), a.clone(), a.clone()])
            && v.value == rat(-3, 32)));
    }

    #[test]
    fn refusals() {
        let tight = ScanOptions {
            budget: 100,
            ..Default::default()
        };
        assert!(matches!(
            exhaustive_scan(3, 3, ScanTarget::En, &tight),
            Err(Error::BudgetExceeded { needed: 1540, .. })
        ));
        let opts = ScanOptions::default();
        assert!(exhaustive_scan(2, 4, ScanTarget::Kappa3, &opts).is_err());
        assert!(random_scan(3, 3, 0, 1, &opts).is_err());
        assert!(rectangle_scan(2, 3, 0, 1, &opts).is_err());
    }

    #[test]
    fn accumulator_merge_is_order_free() {
        let w = |v: usize| Witness::Staircases(vec![StaircaseSeq::constant(2, v).unwrap()]);
        let items = [
            (0, int(1)),
            (1, int(0)),
            (2, int(0)),
            (0, int(-1)),
            (1, int(-1)),
        ];
        let seq = items
            .iter()
            .fold(Acc::new(1), |acc, (i, v)| acc.push(w(*i), v.clone()));
        let left = items[..2]
            .iter()
            .fold(Acc::new(1), |acc, (i, v)| acc.push(w(*i), v.clone()));
        let right = items[2..]
            .iter()
            .fold(Acc::new(1), |acc, (i, v)| acc.push(w(*i), v.clone()));
        let merged = right.merge(left);
        assert_eq!(merged.min, seq.min);
        assert_eq!(merged.argmin, seq.argmin);
        assert_eq!(merged.argmin_count, 2);
        assert_eq!(merged.violations, seq.violations);
        assert_eq!(merged.violation_count, 2);
        assert_eq!(merged.argmin, vec![w(0)]);
    }
}
