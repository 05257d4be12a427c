//! Truncated Poincaré series for the James construction, the Lie summands
//! `L_k(X)`, and the residual factor of the product decomposition of `JX`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lie_idempotent::{
    is_prime, lie_dimensions, lie_rank_up_to_degree, GradedAlphabet, PrimeField, SignMode,
};

pub const DEFAULT_TRUNCATION: usize = 30;

/// Integer power series `c_0 + c_1 t + ... + c_D t^D`, truncated at degree `D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    coefficients: Vec<BigInt>,
}

impl PowerSeries {
    /// Pads with zeros or drops terms past `truncation`.
    pub fn new<T: Into<BigInt>>(coefficients: Vec<T>, truncation: usize) -> Self {
        let mut coefficients: Vec<BigInt> = coefficients.into_iter().map(Into::into).collect();
        coefficients.resize(truncation + 1, BigInt::zero());
        Self { coefficients }
    }

    pub fn zero(truncation: usize) -> Self {
        Self::new(Vec::<i64>::new(), truncation)
    }

    pub fn one(truncation: usize) -> Self {
        Self::new(vec![1], truncation)
    }

    /// `t^a + t^b + ...`, one term per listed degree.
    pub fn from_degrees(degrees: &[usize], truncation: usize) -> Self {
        let mut out = Self::zero(truncation);
        for &d in degrees {
            if d <= truncation {
                out.coefficients[d] += 1;
            }
        }
        out
    }

    pub fn truncation(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn coefficient(&self, degree: usize) -> BigInt {
        self.coefficients.get(degree).cloned().unwrap_or_default()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.truncation() != other.truncation() {
            return Err(Error::TruncationMismatch(self.truncation(), other.truncation()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coefficients = self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a + b).collect();
        Ok(Self { coefficients })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coefficients = self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a - b).collect();
        Ok(Self { coefficients })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let d = self.truncation();
        let mut out = Self::zero(d);
        for (i, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coefficients[..=d - i].iter().enumerate() {
                out.coefficients[i + j] += a * b;
            }
        }
        Ok(out)
    }

    /// Exact quotient by a series with constant term `±1`.
    pub fn div(&self, divisor: &Self) -> Result<Self> {
        self.check(divisor)?;
        let lead = &divisor.coefficients[0];
        if lead.abs() != BigInt::one() {
            return Err(Error::NonUnitDivisor(lead.to_string()));
        }
        let d = self.truncation();
        let mut quotient = Self::zero(d);
        for i in 0..=d {
            let mut c = self.coefficients[i].clone();
            for j in 1..=i {
                c -= &divisor.coefficients[j] * &quotient.coefficients[i - j];
            }
            quotient.coefficients[i] = c * lead;
        }
        Ok(quotient)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coefficients.iter().all(|c| c.sign() != Sign::Minus)
    }

    /// Coefficient-wise `self <= other`.
    pub fn dominated_by(&self, other: &Self) -> bool {
        self.coefficients.iter().zip(&other.coefficients).all(|(a, b)| a <= b)
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coefficients.iter().position(|c| !c.is_zero())
    }

    /// Letter counts per degree, for reading `v` as the Poincaré series of a
    /// graded basis.
    pub fn degree_counts(&self) -> Result<Vec<usize>> {
        self.coefficients
            .iter()
            .map(|c| {
                c.to_usize()
                    .ok_or_else(|| Error::Config(format!("coefficient {c} is not a letter count")))
            })
            .collect()
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coefficients.iter().map(BigInt::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Serialized as a JSON array of exact integers.
impl Serialize for PowerSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::{Error as _, SerializeSeq};
        let mut seq = serializer.serialize_seq(Some(self.coefficients.len()))?;
        for c in &self.coefficients {
            let number = serde_json::Number::from_str(&c.to_string()).map_err(S::Error::custom)?;
            seq.serialize_element(&number)?;
        }
        seq.end()
    }
}

/// `1 / (1 - v)`: the Poincaré series of the tensor algebra on `v`.
pub fn james_series(v: &PowerSeries) -> Result<PowerSeries> {
    if !v.coefficients[0].is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    let d = v.truncation();
    PowerSeries::one(d).div(&PowerSeries::one(d).sub(v)?)
}

/// How to obtain the ranks of `β_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LnMethod {
    /// Exact elimination over `F_p`, block by block.
    Matrix,
    /// The closed dimension formula for free Lie (super)algebras.
    Formula,
    /// Matrix for small weight components, formula otherwise.
    Auto,
}

/// Word counts above which [`LnMethod::Auto`] switches to the formula.
const MATRIX_WORD_LIMIT: usize = 4096;

/// Poincaré series of `L_n(X)`: the rank of `β_n` over `F_p` on each internal
/// degree of the weight-`n` component.
pub fn ln_series(
    n: usize,
    alphabet: &GradedAlphabet,
    p: u64,
    truncation: usize,
    mode: SignMode,
    method: LnMethod,
) -> Result<PowerSeries> {
    let field = PrimeField::new(p)?;
    if n == 0 {
        return Err(Error::BetaWeight(0));
    }
    if n as u64 % p == 0 {
        return Err(Error::CharacteristicDividesWeight { p, n });
    }
    let method = match method {
        LnMethod::Auto => {
            let small = (alphabet.len() as f64).powi(n as i32) <= MATRIX_WORD_LIMIT as f64;
            if small {
                LnMethod::Matrix
            } else {
                LnMethod::Formula
            }
        }
        other => other,
    };
    let mut out = PowerSeries::zero(truncation);
    match method {
        LnMethod::Matrix => {
            let rank = lie_rank_up_to_degree(n, alphabet, &field, mode, Some(truncation as u64))?;
            for (degree, r) in rank.by_degree {
                out.coefficients[degree as usize] += r;
            }
        }
        LnMethod::Formula | LnMethod::Auto => {
            let max_degree = (0..alphabet.len() as u16).map(|l| alphabet.degree(l)).max().unwrap_or(0);
            let mut counts = vec![0usize; max_degree as usize + 1];
            for l in 0..alphabet.len() as u16 {
                counts[alphabet.degree(l) as usize] += 1;
            }
            for ((w, degree), dim) in lie_dimensions(&counts, n, truncation, mode)? {
                if w == n {
                    out.coefficients[degree] = dim;
                }
            }
        }
    }
    Ok(out)
}

pub const CONDITION_ORDER: &str = "ordering (strictly increasing, each greater than 1)";
pub const CONDITION_COPRIME: &str = "condition (1): k_j not divisible by p";
pub const CONDITION_NO_MULTIPLES: &str = "condition (2): no k_j is a multiple of another";

/// Checks an index sequence against the hypotheses of the decomposition.
pub fn validate_ks(ks: &[usize], p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if let Some(k) = ks.iter().find(|&&k| k <= 1) {
        return Err(Error::InvalidExponentSequence {
            condition: CONDITION_ORDER,
            detail: format!("k = {k}"),
        });
    }
    if let Some(w) = ks.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::InvalidExponentSequence {
            condition: CONDITION_ORDER,
            detail: format!("{} is followed by {}", w[0], w[1]),
        });
    }
    if let Some(k) = ks.iter().find(|&&k| k as u64 % p == 0) {
        return Err(Error::InvalidExponentSequence {
            condition: CONDITION_COPRIME,
            detail: format!("{k} is divisible by {p}"),
        });
    }
    for (i, &a) in ks.iter().enumerate() {
        if let Some(&b) = ks[i + 1..].iter().find(|&&b| b % a == 0) {
            return Err(Error::InvalidExponentSequence {
                condition: CONDITION_NO_MULTIPLES,
                detail: format!("{b} is a multiple of {a}"),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LieFactor {
    pub k: usize,
    pub ln: PowerSeries,
    pub james: PowerSeries,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub truncation: usize,
    pub p: u64,
    pub mode: SignMode,
    pub james: PowerSeries,
    /// Factors with `k_j` past the truncation are omitted; they are `1 + O(t^{D+1})`.
    pub factors: Vec<LieFactor>,
    pub product: PowerSeries,
    pub residual: PowerSeries,
    /// Every residual coefficient is nonnegative.
    pub nonnegative: bool,
    /// The product of the Lie factors is coefficient-wise at most the James series.
    pub dominated: bool,
}

/// `james_series(v) / Π_j james_series(L_{k_j})`, with the verdicts needed
/// for the complementary factor to exist.
pub fn decomposition_residual(
    v: &PowerSeries,
    ks: &[usize],
    p: u64,
    mode: SignMode,
    method: LnMethod,
) -> Result<Decomposition> {
    validate_ks(ks, p)?;
    let truncation = v.truncation();
    let james = james_series(v)?;
    let alphabet = GradedAlphabet::from_degree_counts(&v.degree_counts()?);
    let min_degree = v.order().unwrap_or(truncation + 1);
    let relevant: Vec<usize> = ks
        .iter()
        .copied()
        .filter(|&k| k.saturating_mul(min_degree) <= truncation)
        .collect();
    let factors = relevant
        .par_iter()
        .map(|&k| {
            let ln = ln_series(k, &alphabet, p, truncation, mode, method)?;
            let james = james_series(&ln)?;
            Ok(LieFactor { k, ln, james })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut product = PowerSeries::one(truncation);
    for factor in &factors {
        product = product.mul(&factor.james)?;
    }
    let residual = james.div(&product)?;
    Ok(Decomposition {
        truncation,
        p,
        mode,
        nonnegative: residual.is_nonnegative(),
        dominated: product.dominated_by(&james),
        james,
        factors,
        product,
        residual,
    })
}

/// A concrete choice of `X`, `p` and index set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesInstance {
    pub name: String,
    pub description: String,
    pub p: u64,
    pub v: PowerSeries,
    pub ks: Vec<usize>,
}

impl SeriesInstance {
    pub fn run(&self, mode: SignMode, method: LnMethod) -> Result<Decomposition> {
        decomposition_residual(&self.v, &self.ks, self.p, mode, method)
    }
}

fn primes_up_to(limit: usize) -> Vec<usize> {
    (2..=limit).filter(|&q| is_prime(q as u64)).collect()
}

/// `p = 3`, `v = 2t`, and every prime other than 3 up to the truncation.
pub fn cor41(truncation: usize) -> SeriesInstance {
    SeriesInstance {
        name: "cor41".into(),
        description: "two classes in degree 1, p = 3, k_j the primes other than 3".into(),
        p: 3,
        v: PowerSeries::new(vec![0, 2], truncation),
        ks: primes_up_to(truncation).into_iter().filter(|&q| q != 3).collect(),
    }
}

/// `p = 2`, `v = t^{n-1} + t^n` (the mod-2 Moore space `P^n(2)`), odd primes.
pub fn cor42(n: usize, truncation: usize) -> Result<SeriesInstance> {
    if n < 2 {
        return Err(Error::Config(format!("Moore space P^{n}(2) needs n >= 2")));
    }
    Ok(SeriesInstance {
        name: "cor42".into(),
        description: format!("mod-2 Moore space P^{n}(2), p = 2, k_j the odd primes"),
        p: 2,
        v: PowerSeries::from_degrees(&[n - 1, n], truncation),
        ks: primes_up_to(truncation).into_iter().filter(|&q| q != 2).collect(),
    })
}

/// Looks up a named instance (`cor41`, `cor42`).
pub fn instance(name: &str, moore_n: usize, truncation: usize) -> Result<SeriesInstance> {
    match name {
        "cor41" => Ok(cor41(truncation)),
        "cor42" => cor42(moore_n, truncation),
        other => Err(Error::Config(format!("unknown series instance '{other}' (expected cor41 or cor42)"))),
    }
}
