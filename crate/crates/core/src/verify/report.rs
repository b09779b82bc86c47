use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::lattice::{GridIndicator, RectangleFamily, StaircaseSeq};
use crate::rational::{serde_pq, to_pq, Rational};

use super::props::PropId;
use super::scan::{ScanMode, ScanTarget};

/// A canonical (sorted) family of functions, replayable from JSON alone.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    Staircases(Vec<StaircaseSeq>),
    Rectangles(RectangleFamily),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Staircases(seqs) => {
                let parts: Vec<String> = seqs.iter().map(|s| s.to_string()).collect();
                write!(f, "{}", parts.join(" "))
            }
            Witness::Rectangles(fam) => {
                let parts: Vec<String> = fam
                    .rects()
                    .iter()
                    .map(|r| {
                        let cs: Vec<String> = r.iter().map(to_pq).collect();
                        format!("[{}]", cs.join(","))
                    })
                    .collect();
                write!(f, "{}", parts.join(" "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub witness: Witness,
    #[serde(with = "serde_pq")]
    pub value: Rational,
}

/// Result of a positivity scan.
///
/// `argmin` and `violations` hold the canonically smallest entries, at most
/// the configured list limit; the `_count` fields give the full totals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub mode: ScanMode,
    pub target: ScanTarget,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    /// Ordered tuples covered (`|A(m)|^n` for exhaustive scans).
    pub tuple_count: u64,
    /// Canonical tuples actually evaluated.
    pub evaluated: u64,
    #[serde(with = "serde_pq")]
    pub min_value: Rational,
    pub argmin_count: u64,
    pub argmin: Vec<Witness>,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    /// Wall-clock time; kept out of the JSON so reports stay byte-stable.
    #[serde(skip)]
    pub elapsed: Duration,
}

/// One instance where an identity or inequality failed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Failure {
    pub functions: Vec<StaircaseSeq>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub set: Option<GridIndicator>,
    /// 1-based descent position, when the check perturbs at one.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub descent: Option<usize>,
    pub relation: String,
    #[serde(with = "serde_pq")]
    pub lhs: Rational,
    #[serde(with = "serde_pq")]
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropCheckReport {
    pub prop: PropId,
    pub m: usize,
    pub n: usize,
    pub instances_checked: u64,
    /// True when some cell subsets were sampled instead of enumerated.
    pub sampled: bool,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl PropCheckReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}
