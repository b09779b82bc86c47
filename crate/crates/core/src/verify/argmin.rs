use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{en_partition, StaircaseOracle};
use crate::error::{Error, Result};
use crate::lattice::StaircaseSeq;
use crate::rational::{serde_pq, Rational};

use super::report::Witness;
use super::scan::{check_budget, multiset_count, ScanOptions};
use super::{multisets, with_workers};

/// Minimizers of `E_n` over `A(m)`, refined by maximal `λ = Σ E(aⁱ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgminReport {
    pub m: usize,
    pub n: usize,
    pub tuple_count: u64,
    #[serde(with = "serde_pq")]
    pub min_value: Rational,
    pub minimizer_count: u64,
    #[serde(with = "serde_pq")]
    pub max_lambda: Rational,
    pub extremal_count: u64,
    /// Canonically smallest extremal tuples, at most the list limit.
    pub extremal: Vec<Witness>,
    /// Whether every extremal tuple (listed or not) consists of constant
    /// sequences.
    pub all_constant: bool,
}

/// Scans every multiset of `n` sequences from `A(m)`, keeps the `E_n`
/// minimizers and, among them, those maximizing `λ`.
pub fn argmin_structure(m: usize, n: usize, opts: &ScanOptions) -> Result<ArgminReport> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("m and n must be at least 1".into()));
    }
    let all = StaircaseSeq::all(m);
    let count = multiset_count(all.len(), n);
    check_budget(count, opts.budget)?;
    let tuples = multisets(all.len(), n);
    let scored: Vec<(Rational, Rational, Vec<usize>)> = with_workers(opts.workers, || {
        tuples
            .into_par_iter()
            .map(|idx| {
                let seqs: Vec<StaircaseSeq> = idx.iter().map(|&i| all[i].clone()).collect();
                let lambda = seqs.iter().map(StaircaseSeq::expect).sum::<Rational>();
                let value = en_partition(&StaircaseOracle::new(seqs)?)?.value;
                Ok((value, lambda, idx))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let min_value = scored
        .iter()
        .map(|s| &s.0)
        .min()
        .cloned()
        .unwrap_or_default();
    let minimizers: Vec<&(Rational, Rational, Vec<usize>)> =
        scored.iter().filter(|s| s.0 == min_value).collect();
    let max_lambda = minimizers
        .iter()
        .map(|s| &s.1)
        .max()
        .cloned()
        .unwrap_or_default();
    let mut extremal: Vec<Witness> = minimizers
        .iter()
        .filter(|s| s.1 == max_lambda)
        .map(|s| Witness::Staircases(s.2.iter().map(|&i| all[i].clone()).collect()))
        .collect();
    extremal.sort();
    let all_constant = extremal.iter().all(|w| match w {
        Witness::Staircases(seqs) => seqs.iter().all(StaircaseSeq::is_constant),
        Witness::Rectangles(_) => false,
    });
    let extremal_count = extremal.len() as u64;
    extremal.truncate(opts.list_limit.max(1));
    Ok(ArgminReport {
        m,
        n,
        tuple_count: count as u64,
        min_value,
        minimizer_count: minimizers.len() as u64,
        max_lambda,
        extremal_count,
        extremal,
        all_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn m2_n3_extremals_are_constant() {
        let r = argmin_structure(2, 3, &ScanOptions::default()).unwrap();
        assert_eq!(r.tuple_count, 56);
        assert!(r.min_value.is_zero());
        assert!(r.extremal_count >= 1);
        assert!(r.all_constant);
    }
}
