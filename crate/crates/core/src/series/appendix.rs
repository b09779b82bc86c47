use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::GridFunction;
use crate::rational::{factorial, Rational};

use super::partitions::{partitions_of, z_lambda};
use super::power::{series_exp, GridSeries, TruncatedSeries};

/// Largest degree for equal-function identities.
pub const EQUAL_DEGREE_CAP: usize = 8;
/// Largest family for prime-exponent extraction by default (`N = 31`).
pub const EXTRACT_CAP: usize = 3;
/// Largest family with the override flag (`N = 247`).
pub const EXTRACT_CAP_OVERRIDE: usize = 4;
/// Largest `n` for [`PrimesEncoding`].
pub const PRIMES_CAP: usize = 8;

/// `p_d(f) = E(f^d)`.
pub fn moment(f: &GridFunction, d: usize) -> Result<Rational> {
    if d == 0 {
        return Err(Error::InvalidArgument("moment order must be >= 1".into()));
    }
    let total: Rational = f
        .values()
        .iter()
        .map(|v| num_traits::pow(v.clone(), d))
        .sum();
    Ok(total / Rational::from_integer(BigInt::from(f.m() * f.m())))
}

/// The moments `p_1(f), …, p_D(f)` of one function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentVector {
    f: GridFunction,
    p: Vec<Rational>,
}

impl MomentVector {
    pub fn new(f: &GridFunction, degree: usize) -> Result<Self> {
        let p = (1..=degree).map(|d| moment(f, d)).collect::<Result<_>>()?;
        Ok(MomentVector { f: f.clone(), p })
    }

    pub fn function(&self) -> &GridFunction {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.p.len()
    }

    /// `p_d`, for `1 <= d <= degree`.
    pub fn p(&self, d: usize) -> &Rational {
        &self.p[d - 1]
    }

    /// `p_λ = ∏ p_{λ_i}`.
    pub fn p_lambda(&self, parts: &[usize]) -> Rational {
        parts
            .iter()
            .fold(Rational::one(), |acc, &d| acc * self.p(d))
    }
}

/// `E_n(f, …, f) = n! Σ_{|λ|=n} (−1)^{l(λ)−1} p_λ(f) / z_λ`, a sum over cycle
/// types instead of permutations.
pub fn en_equal(f: &GridFunction, n: usize) -> Result<Rational> {
    let lambdas: Vec<_> = partitions_of(n)?.collect();
    let mv = MomentVector::new(f, n)?;
    let mut sum = Rational::zero();
    for lam in &lambdas {
        let z = BigInt::from(z_lambda(lam));
        let term = mv.p_lambda(lam.parts()) / z;
        if lam.len() % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum * factorial(n))
}

/// `c_1, …, c_D` in `exp(E(log F)) = 1 − c_1 t − c_2 t² − ⋯` for
/// `F = 1 − f_1 t − f_2 t² − ⋯`. `fs[i]` is the coefficient of `t^{i+1}`;
/// missing coefficients up to `degree` are zero.
pub fn geometric_mean_coeffs(fs: &[GridFunction], degree: usize) -> Result<Vec<Rational>> {
    if degree == 0 {
        return Err(Error::InvalidArgument("degree must be >= 1".into()));
    }
    let terms: Vec<(usize, &GridFunction)> =
        fs.iter().enumerate().map(|(i, f)| (i + 1, f)).collect();
    let g = geometric_mean(&terms, degree)?;
    Ok((1..=degree).map(|j| -g.coeff(j).clone()).collect())
}

fn geometric_mean(terms: &[(usize, &GridFunction)], degree: usize) -> Result<TruncatedSeries> {
    let f = GridSeries::one_minus(terms, degree)?;
    series_exp(&f.expect_log()?)
}

/// Exponents that isolate `E_n(f_1, …, f_n)` as a single series
/// coefficient: with `k = p_1⋯p_n` (first `n` primes), `k_j = k/p_j` and
/// `N = Σ k_j`, the only solution of `Σ s_j k_j = N` in nonnegative integers
/// is `s = (1, …, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimesEncoding {
    pub primes: Vec<u64>,
    pub k: u64,
    pub exponents: Vec<u64>,
    pub target: u64,
}

impl PrimesEncoding {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if n > PRIMES_CAP {
            return Err(Error::CapExceeded {
                what: "primes encoding",
                n,
                cap: PRIMES_CAP,
            });
        }
        let primes = first_primes(n);
        let k: u64 = primes.iter().product();
        let exponents: Vec<u64> = primes.iter().map(|p| k / p).collect();
        let target = exponents.iter().sum();
        let enc = PrimesEncoding {
            primes,
            k,
            exponents,
            target,
        };
        if n <= 4 {
            let sols = enc.solutions();
            if sols != [vec![1; n]] {
                return Err(Error::Invariant(format!(
                    "exponent encoding for n = {n} is not unique: {sols:?}"
                )));
            }
        }
        Ok(enc)
    }

    /// Every `s ≥ 0` with `Σ s_j k_j = N`, by bounded enumeration.
    pub fn solutions(&self) -> Vec<Vec<u64>> {
        fn rec(ks: &[u64], left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
            match ks.split_first() {
                None => {
                    if left == 0 {
                        out.push(cur.clone());
                    }
                }
                Some((&k, rest)) => {
                    for s in 0..=left / k {
                        cur.push(s);
                        rec(rest, left - s * k, cur, out);
                        cur.pop();
                    }
                }
            }
        }
        let mut out = Vec::new();
        rec(&self.exponents, self.target, &mut Vec::new(), &mut out);
        out
    }
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut primes: Vec<u64> = Vec::with_capacity(n);
    let mut c = 2;
    while primes.len() < n {
        if primes.iter().all(|p| c % p != 0) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

/// Reads `E_n(f_1, …, f_n)` off the `t^N` coefficient of
/// `1 − exp(E(log(1 − Σ_j f_j t^{k_j})))`.
///
/// Families up to [`EXTRACT_CAP`] run by default; `allow_large` raises the
/// cap to [`EXTRACT_CAP_OVERRIDE`].
pub fn extract_en_via_series(fs: &[GridFunction], allow_large: bool) -> Result<Rational> {
    let n = fs.len();
    let cap = if allow_large {
        EXTRACT_CAP_OVERRIDE
    } else {
        EXTRACT_CAP
    };
    if n > cap {
        return Err(Error::CapExceeded {
            what: "series extraction",
            n,
            cap,
        });
    }
    let enc = PrimesEncoding::new(n)?;
    let terms: Vec<(usize, &GridFunction)> = enc
        .exponents
        .iter()
        .zip(fs)
        .map(|(&k, f)| (k as usize, f))
        .collect();
    let g = geometric_mean(&terms, enc.target as usize)?;
    Ok(-g.coeff(enc.target as usize).clone())
}
