use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::GridFunction;
use crate::rational::{serde_pq_vec, Rational};

/// A power series in `t` truncated after degree `degree`; coefficients past
/// the cap are never stored or read.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TruncatedSeries {
    degree: usize,
    #[serde(with = "serde_pq_vec")]
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    /// Coefficients beyond `degree` are dropped; missing ones are zero.
    pub fn new(degree: usize, mut coeffs: Vec<Rational>) -> Self {
        coeffs.resize(degree + 1, Rational::zero());
        TruncatedSeries { degree, coeffs }
    }

    pub fn zero(degree: usize) -> Self {
        Self::new(degree, Vec::new())
    }

    pub fn one(degree: usize) -> Self {
        Self::new(degree, vec![Rational::one()])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Rational {
        &self.coeffs[k]
    }

    fn check_degree(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree {
            return Err(Error::InvalidArgument(format!(
                "degree mismatch: {} vs {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_degree(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(TruncatedSeries {
            degree: self.degree,
            coeffs,
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        TruncatedSeries {
            degree: self.degree,
            coeffs,
        }
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_degree(other)?;
        let mut coeffs = vec![Rational::zero(); self.degree + 1];
        for (i, a) in self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in other.coeffs[..=self.degree - i].iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Ok(TruncatedSeries {
            degree: self.degree,
            coeffs,
        })
    }
}

/// `log F` for `F(0) = 1`, from `k L_k = k F_k − Σ_{j<k} j L_j F_{k−j}`.
pub fn series_log(f: &TruncatedSeries) -> Result<TruncatedSeries> {
    if !f.coeffs[0].is_one() {
        return Err(Error::InvalidArgument(format!(
            "log needs constant term 1, got {}",
            f.coeffs[0]
        )));
    }
    let d = f.degree;
    let support: Vec<usize> = (1..=d).filter(|&k| !f.coeffs[k].is_zero()).collect();
    let mut l = vec![Rational::zero(); d + 1];
    for k in 1..=d {
        // Σ_{j=1}^{k-1} j L_j F_{k-j}, over the nonzero F_{k-j}
        let mut acc = Rational::zero();
        for &s in support.iter().take_while(|&&s| s < k) {
            let j = k - s;
            if !l[j].is_zero() {
                acc += &l[j] * &f.coeffs[s] * BigInt::from(j);
            }
        }
        l[k] = &f.coeffs[k] - acc / BigInt::from(k);
    }
    Ok(TruncatedSeries {
        degree: d,
        coeffs: l,
    })
}

/// `exp Z` for `Z(0) = 0`, from `k E_k = Σ_{j=1}^k j Z_j E_{k−j}`.
pub fn series_exp(z: &TruncatedSeries) -> Result<TruncatedSeries> {
    if !z.coeffs[0].is_zero() {
        return Err(Error::InvalidArgument(format!(
            "exp needs constant term 0, got {}",
            z.coeffs[0]
        )));
    }
    let d = z.degree;
    let support: Vec<usize> = (1..=d).filter(|&k| !z.coeffs[k].is_zero()).collect();
    let mut e = vec![Rational::zero(); d + 1];
    e[0] = Rational::one();
    for k in 1..=d {
        let mut acc = Rational::zero();
        for &j in support.iter().take_while(|&&j| j <= k) {
            acc += &z.coeffs[j] * &e[k - j] * BigInt::from(j);
        }
        e[k] = acc / BigInt::from(k);
    }
    Ok(TruncatedSeries {
        degree: d,
        coeffs: e,
    })
}

/// A power series whose coefficients are cell-constant functions on one
/// `m × m` grid, stored as one rational series per cell (row-major).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSeries {
    m: usize,
    degree: usize,
    cells: Vec<TruncatedSeries>,
}

impl GridSeries {
    /// `1 − Σ_j f_j t^{k_j}`; terms with `k_j > degree` vanish under the
    /// truncation. Repeated exponents add up.
    pub fn one_minus(terms: &[(usize, &GridFunction)], degree: usize) -> Result<Self> {
        let m = terms
            .first()
            .map(|(_, f)| f.m())
            .ok_or_else(|| Error::InvalidArgument("no terms".into()))?;
        if let Some((_, f)) = terms.iter().find(|(_, f)| f.m() != m) {
            return Err(Error::MismatchedResolution(m, f.m()));
        }
        if terms.iter().any(|(k, _)| *k == 0) {
            return Err(Error::InvalidArgument("exponents must be positive".into()));
        }
        let cells = (0..m * m)
            .map(|c| {
                let mut coeffs = vec![Rational::zero(); degree + 1];
                coeffs[0] = Rational::one();
                for &(k, f) in terms {
                    if k <= degree {
                        coeffs[k] -= &f.values()[c];
                    }
                }
                TruncatedSeries { degree, coeffs }
            })
            .collect();
        Ok(GridSeries { m, degree, cells })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Series of the cell `(i,j)`, 1-based.
    pub fn cell(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.cells[(i - 1) * self.m + (j - 1)]
    }

    /// Cell-wise logarithm.
    pub fn log(&self) -> Result<GridSeries> {
        let cells = self.cells.iter().map(series_log).collect::<Result<_>>()?;
        Ok(GridSeries {
            m: self.m,
            degree: self.degree,
            cells,
        })
    }

    /// Cell-wise average: the expectation of the series under the uniform
    /// measure.
    pub fn expect(&self) -> TruncatedSeries {
        let mut counts: BTreeMap<&TruncatedSeries, i64> = BTreeMap::new();
        for c in &self.cells {
            *counts.entry(c).or_default() += 1;
        }
        self.average(counts.into_iter().map(|(s, k)| (s.clone(), k)))
    }

    /// `E(log F)`. Cells with identical series share one logarithm, which
    /// keeps indicator inputs down to a handful of distinct evaluations.
    pub fn expect_log(&self) -> Result<TruncatedSeries> {
        let mut counts: BTreeMap<&TruncatedSeries, i64> = BTreeMap::new();
        for c in &self.cells {
            *counts.entry(c).or_default() += 1;
        }
        let logs = counts
            .into_iter()
            .map(|(s, k)| Ok((series_log(s)?, k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.average(logs.into_iter()))
    }

    fn average(&self, weighted: impl Iterator<Item = (TruncatedSeries, i64)>) -> TruncatedSeries {
        let mut total = TruncatedSeries::zero(self.degree);
        for (s, k) in weighted {
            total = total
                .add(&s.scale(&Rational::from_integer(BigInt::from(k))))
                .expect("same degree");
        }
        total.scale(&Rational::new(BigInt::one(), BigInt::from(self.m * self.m)))
    }
}
