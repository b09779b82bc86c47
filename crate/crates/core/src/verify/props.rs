use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{en_partition, ExpectationOracle, IndicatorOracle, StaircaseOracle, WithUnit};
use crate::error::{Error, Result};
use crate::lattice::{GridIndicator, Perturbation, StaircaseSeq};
use crate::rational::{int, Rational};

use super::report::{Failure, PropCheckReport};
use super::sampling::seeded_rng;
use super::scan::{check_budget, multiset_count, ScanOptions};
use super::{multisets, with_workers};

/// Cell subsets are enumerated exhaustively up to this many free cells and
/// sampled beyond it.
const FULL_SUBSET_CELLS: usize = 12;
const SAMPLED_SUBSETS: usize = 4096;
const SUBSET_SEED: u64 = 0;

/// The identities and inequalities the harness can check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PropId {
    /// `2E_n(…, a) = E_n(…, a⁺) + E_n(…, a⁻)` when only `a` descends at `i`.
    #[serde(rename = "averaging")]
    Averaging,
    /// `E_n(a★, b, …) ≤ E_n(a, b, …)` when `a, b` descend at `i` and
    /// `b_{i+1} ≤ a_{i+1}` (star on the first argument).
    #[serde(rename = "star")]
    Star,
    /// `a★b = ab` under the same hypothesis.
    #[serde(rename = "meet-star")]
    MeetStar,
    /// `E(a⁺b) + E(a⁻b) = 2E(ab)` when `a` descends at `i` and `b` does not.
    #[serde(rename = "apmb")]
    Apmb,
    /// `E_n(χ_{a^1}, …, χ_b, χ_S) ≤ 0` whenever `χ_b χ_S = 0`.
    #[serde(rename = "A_n")]
    An,
    /// `E_n(…, b, c★) ≤ E_n(…, b, c)` when `b, c` descend at `i` and
    /// `b_{i+1} ≤ c_{i+1}` (star on the last argument).
    #[serde(rename = "B_n")]
    Bn,
    /// `E_n(f^1, …, f^{n-1}, 1) = (n − 2)·E_{n-1}(f^1, …, f^{n-1})`.
    #[serde(rename = "branching")]
    Branching,
}

impl PropId {
    pub const ALL: [PropId; 7] = [
        PropId::Averaging,
        PropId::Star,
        PropId::MeetStar,
        PropId::Apmb,
        PropId::An,
        PropId::Bn,
        PropId::Branching,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PropId::Averaging => "averaging",
            PropId::Star => "star",
            PropId::MeetStar => "meet-star",
            PropId::Apmb => "apmb",
            PropId::An => "A_n",
            PropId::Bn => "B_n",
            PropId::Branching => "branching",
        }
    }
}

impl fmt::Display for PropId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PropId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PropId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown proposition {s:?}")))
    }
}

struct Instance {
    functions: Vec<StaircaseSeq>,
    set: Option<GridIndicator>,
    descent: Option<usize>,
}

fn e_n(seqs: &[StaircaseSeq]) -> Result<Rational> {
    Ok(en_partition(&StaircaseOracle::new(seqs.to_vec())?)?.value)
}

fn failure(inst: &Instance, relation: &str, lhs: Rational, rhs: Rational) -> Failure {
    Failure {
        functions: inst.functions.clone(),
        set: inst.set.clone(),
        descent: inst.descent,
        relation: relation.to_string(),
        lhs,
        rhs,
    }
}

fn eq_check(inst: &Instance, lhs: Rational, rhs: Rational) -> Option<Failure> {
    (lhs != rhs).then(|| failure(inst, "==", lhs, rhs))
}

fn le_check(inst: &Instance, lhs: Rational, rhs: Rational) -> Option<Failure> {
    (lhs > rhs).then(|| failure(inst, "<=", lhs, rhs))
}

fn replace_at(seqs: &[StaircaseSeq], pos: usize, with: StaircaseSeq) -> Vec<StaircaseSeq> {
    let mut v = seqs.to_vec();
    v[pos] = with;
    v
}

/// Pairs `(a, b)` and descents `i` with both descending at `i` and
/// `b_{i+1} ≤ a_{i+1}`.
fn star_pairs(all: &[StaircaseSeq]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for (ai, a) in all.iter().enumerate() {
        for i in a.descents() {
            for (bi, b) in all.iter().enumerate() {
                if b.has_descent(i) && b.value(i + 1) <= a.value(i + 1) {
                    out.push((ai, bi, i));
                }
            }
        }
    }
    out
}

fn need_n(n: usize, min: usize, prop: PropId) -> Result<()> {
    if n < min {
        return Err(Error::InvalidArgument(format!("{prop} needs n >= {min}")));
    }
    Ok(())
}

/// Instance count, then the instances themselves. Counting first lets the
/// budget refuse before anything is materialized.
fn plan(prop: PropId, m: usize, n: usize, budget: u64) -> Result<(Vec<Instance>, bool)> {
    let all = StaircaseSeq::all(m);
    let len = all.len();
    let pick =
        |idx: &[usize]| -> Vec<StaircaseSeq> { idx.iter().map(|&i| all[i].clone()).collect() };
    let mut sampled = false;
    let instances = match prop {
        PropId::Averaging => {
            need_n(n, 1, prop)?;
            let mut heads = Vec::new();
            let mut needed = 0u128;
            for (ai, a) in all.iter().enumerate() {
                for i in a.descents() {
                    let flat: Vec<usize> = (0..len).filter(|&j| !all[j].has_descent(i)).collect();
                    needed += multiset_count(flat.len(), n - 1);
                    heads.push((ai, i, flat));
                }
            }
            check_budget(needed, budget)?;
            let mut out = Vec::new();
            for (ai, i, flat) in heads {
                for rest in multisets(flat.len(), n - 1) {
                    let mut functions: Vec<StaircaseSeq> =
                        rest.iter().map(|&r| all[flat[r]].clone()).collect();
                    functions.push(all[ai].clone());
                    out.push(Instance {
                        functions,
                        set: None,
                        descent: Some(i),
                    });
                }
            }
            out
        }
        PropId::Star | PropId::Bn => {
            need_n(n, 2, prop)?;
            let pairs = star_pairs(&all);
            check_budget(pairs.len() as u128 * multiset_count(len, n - 2), budget)?;
            let rests = multisets(len, n - 2);
            let mut out = Vec::new();
            for &(ai, bi, i) in &pairs {
                for rest in &rests {
                    let functions = if prop == PropId::Star {
                        // [a, b, rest…] with the star on a
                        let mut f = vec![all[ai].clone(), all[bi].clone()];
                        f.extend(pick(rest));
                        f
                    } else {
                        // [rest…, b, c] with the star on c = the larger partner
                        let mut f = pick(rest);
                        f.push(all[bi].clone());
                        f.push(all[ai].clone());
                        f
                    };
                    out.push(Instance {
                        functions,
                        set: None,
                        descent: Some(i),
                    });
                }
            }
            out
        }
        PropId::MeetStar => star_pairs(&all)
            .into_iter()
            .map(|(ai, bi, i)| Instance {
                functions: vec![all[ai].clone(), all[bi].clone()],
                set: None,
                descent: Some(i),
            })
            .collect(),
        PropId::Apmb => {
            let mut out = Vec::new();
            for a in &all {
                for i in a.descents() {
                    for b in all.iter().filter(|b| !b.has_descent(i)) {
                        out.push(Instance {
                            functions: vec![a.clone(), b.clone()],
                            set: None,
                            descent: Some(i),
                        });
                    }
                }
            }
            out
        }
        PropId::An => {
            need_n(n, 2, prop)?;
            let per_b: u128 = all
                .iter()
                .map(|b| {
                    let free = m * m - b.cell_count();
                    if free <= FULL_SUBSET_CELLS {
                        1u128 << free
                    } else {
                        SAMPLED_SUBSETS as u128
                    }
                })
                .sum();
            check_budget(per_b * multiset_count(len, n - 2), budget)?;
            let rests = multisets(len, n - 2);
            let mut rng = seeded_rng(SUBSET_SEED);
            let mut out = Vec::new();
            for b in &all {
                let free = b.indicator().complement();
                let subsets = if free.count() <= FULL_SUBSET_CELLS {
                    free.subsets()
                } else {
                    sampled = true;
                    sample_subsets(&free, SAMPLED_SUBSETS, &mut rng)
                };
                for rest in &rests {
                    for s in &subsets {
                        let mut functions = pick(rest);
                        functions.push(b.clone());
                        out.push(Instance {
                            functions,
                            set: Some(s.clone()),
                            descent: None,
                        });
                    }
                }
            }
            out
        }
        PropId::Branching => {
            need_n(n, 2, prop)?;
            check_budget(multiset_count(len, n - 1), budget)?;
            multisets(len, n - 1)
                .into_iter()
                .map(|idx| Instance {
                    functions: pick(&idx),
                    set: None,
                    descent: None,
                })
                .collect()
        }
    };
    Ok((instances, sampled))
}

fn sample_subsets(
    free: &GridIndicator,
    count: usize,
    rng: &mut super::ScanRng,
) -> Vec<GridIndicator> {
    use rand::Rng;
    let cells: Vec<(usize, usize)> = free.cells().collect();
    (0..count)
        .map(|_| {
            let chosen = cells.iter().copied().filter(|_| rng.gen_bool(0.5));
            GridIndicator::new(free.m(), chosen).expect("cells come from the same grid")
        })
        .collect()
}

fn check(prop: PropId, inst: &Instance) -> Result<Option<Failure>> {
    let f = &inst.functions;
    let two = int(2);
    Ok(match prop {
        PropId::Averaging => {
            let i = inst.descent.expect("descent");
            let last = f.len() - 1;
            let a = &f[last];
            let plus = replace_at(f, last, a.perturb(i, Perturbation::Plus)?);
            let minus = replace_at(f, last, a.perturb(i, Perturbation::Minus)?);
            eq_check(inst, &two * e_n(f)?, e_n(&plus)? + e_n(&minus)?)
        }
        PropId::Star => {
            let i = inst.descent.expect("descent");
            let starred = replace_at(f, 0, f[0].perturb(i, Perturbation::Star)?);
            le_check(inst, e_n(&starred)?, e_n(f)?)
        }
        PropId::Bn => {
            let i = inst.descent.expect("descent");
            let last = f.len() - 1;
            let starred = replace_at(f, last, f[last].perturb(i, Perturbation::Star)?);
            le_check(inst, e_n(&starred)?, e_n(f)?)
        }
        PropId::MeetStar => {
            let i = inst.descent.expect("descent");
            let lhs = f[0].perturb(i, Perturbation::Star)?.meet(&f[1])?;
            let rhs = f[0].meet(&f[1])?;
            if lhs == rhs {
                None
            } else {
                Some(failure(inst, "==", lhs.expect(), rhs.expect()))
            }
        }
        PropId::Apmb => {
            let i = inst.descent.expect("descent");
            let (a, b) = (&f[0], &f[1]);
            let plus = a.perturb(i, Perturbation::Plus)?.meet(b)?.expect();
            let minus = a.perturb(i, Perturbation::Minus)?.meet(b)?.expect();
            eq_check(inst, plus + minus, two * a.meet(b)?.expect())
        }
        PropId::An => {
            let mut sets: Vec<GridIndicator> = f.iter().map(StaircaseSeq::indicator).collect();
            sets.push(inst.set.clone().expect("cell set"));
            let value = en_partition(&IndicatorOracle::new(sets)?)?.value;
            le_check(inst, value, int(0))
        }
        PropId::Branching => {
            let oracle = StaircaseOracle::new(f.clone())?;
            let n = oracle.arity() + 1;
            let prev = en_partition(&oracle)?.value;
            let with_unit = en_partition(&WithUnit::new(&oracle)?)?.value;
            eq_check(inst, with_unit, int(n as i64 - 2) * prev)
        }
    })
}

/// Checks `prop` on every admissible instance over `A(m)` with `n`
/// functions (`n` is ignored by the two-sequence lemmas).
pub fn check_proposition(
    prop: PropId,
    m: usize,
    n: usize,
    opts: &ScanOptions,
) -> Result<PropCheckReport> {
    let started = Instant::now();
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let (instances, sampled) = plan(prop, m, n, opts.budget)?;
    let checked = instances.len() as u64;
    let results: Vec<Option<Failure>> = with_workers(opts.workers, || {
        instances
            .par_iter()
            .map(|inst| check(prop, inst))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut failures: Vec<Failure> = results.into_iter().flatten().collect();
    let failure_count = failures.len() as u64;
    failures.sort();
    failures.truncate(opts.list_limit.max(1));
    Ok(PropCheckReport {
        prop,
        m,
        n,
        instances_checked: checked,
        sampled,
        failure_count,
        failures,
        elapsed: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in PropId::ALL {
            assert_eq!(p.as_str().parse::<PropId>().unwrap(), p);
            assert_eq!(
                serde_json::to_string(&p).unwrap(),
                format!("\"{}\"", p.as_str())
            );
        }
        assert!("nope".parse::<PropId>().is_err());
    }

    #[test]
    fn small_checks_pass() {
        let opts = ScanOptions::default();
        for p in PropId::ALL {
            let r = check_proposition(p, 2, 3, &opts).unwrap();
            assert!(r.passed(), "{p}: {:?}", r.failures);
            assert!(r.instances_checked > 0, "{p}");
        }
    }

    #[test]
    fn budget_refusal() {
        let opts = ScanOptions::default();
        assert!(matches!(
            check_proposition(PropId::An, 3, 5, &opts),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    // Deliberately false relation: E_n(…, a⁺) <= E_n(…, a) fails somewhere,
    // so the comparison helpers do report failures.
    #[test]
    fn checker_detects_broken_relations() {
        let a = StaircaseSeq::new(2, vec![2, 0]).unwrap();
        let inst = Instance {
            functions: vec![a.clone()],
            set: None,
            descent: Some(1),
        };
        assert!(eq_check(&inst, int(1), int(2)).is_some());
        assert!(le_check(&inst, int(2), int(1)).is_some());
        assert!(le_check(&inst, int(1), int(1)).is_none());
    }
}
