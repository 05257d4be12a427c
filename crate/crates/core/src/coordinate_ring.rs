//! The coordinate ring `R_{n,k}`.
//!
//! `R_{n,k}` is the free associative ring over the integers on the arity-`k`
//! tuple letters over `{1..n}`, modulo every monomial in which some coordinate
//! index occurs twice. A generator class `{x_{i_1}|...|x_{i_k}}` is modelled by
//! the unit `1 + e_(i_1,...,i_k)`. Since `e_g * e_g` always vanishes, powers of
//! a generator stay linear in `e_g`, and letters sharing an index commute.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of coordinates supported; index sets are tracked as `u64` masks.
pub const MAX_COORDINATES: usize = 64;

/// The `(n, k)` pair a series lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RingContext {
    pub n: usize,
    pub arity: usize,
}

impl RingContext {
    pub fn new(n: usize, arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidContext {
                n,
                arity,
                reason: "arity must be at least 1",
            });
        }
        if n > MAX_COORDINATES {
            return Err(Error::InvalidContext {
                n,
                arity,
                reason: "too many coordinates",
            });
        }
        Ok(Self { n, arity })
    }

    /// Longest monomial that can be nonzero.
    pub fn max_length(&self) -> usize {
        self.n / self.arity
    }

    pub fn check_letter(&self, letter: &TupleLetter) -> Result<()> {
        if letter.arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: letter.arity(),
            });
        }
        letter.check_range(self.n)
    }

    /// Rank of `R_{n,k}` as a free abelian group: the number of ordered
    /// sequences of pairwise disjoint ordered `k`-tuples from `{1..n}`.
    pub fn basis_dimension(&self) -> BigInt {
        let mut total = BigInt::zero();
        for s in 0..=self.max_length() {
            let used = s * self.arity;
            let mut falling = BigInt::one();
            for i in 0..used {
                falling *= self.n - i;
            }
            total += falling;
        }
        total
    }
}

impl fmt::Display for RingContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R(n={}, k={})", self.n, self.arity)
    }
}

/// An ordered tuple of coordinate indices, the symbol `{x_{i_1}|...|x_{i_k}}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TupleLetter(Vec<u8>);

impl TupleLetter {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut out = Vec::new();
        for index in indices {
            if index == 0 || index > MAX_COORDINATES {
                return Err(Error::IndexOutOfRange {
                    index,
                    n: MAX_COORDINATES,
                });
            }
            out.push(index as u8);
        }
        if out.is_empty() {
            return Err(Error::EmptyLetter);
        }
        Ok(Self(out))
    }

    /// A single coordinate `x_i`.
    pub fn single(index: usize) -> Result<Self> {
        Self::new([index])
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&i| i as usize)
    }

    pub(crate) fn raw(&self) -> &[u8] {
        &self.0
    }

    /// True when some index occurs twice; such a letter is trivial in every `K_n(k)`.
    pub fn is_null(&self) -> bool {
        index_mask(&self.0).is_none()
    }

    pub fn concat(&self, other: &TupleLetter) -> TupleLetter {
        let mut indices = self.0.clone();
        indices.extend_from_slice(&other.0);
        TupleLetter(indices)
    }

    /// Rearranges entries so that entry `i` of the result is entry `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<TupleLetter> {
        if order.len() != self.0.len() {
            return Err(Error::SizeMismatch {
                expected: self.0.len(),
                found: order.len(),
            });
        }
        Ok(TupleLetter(order.iter().map(|&i| self.0[i]).collect()))
    }

    pub(crate) fn check_range(&self, n: usize) -> Result<()> {
        match self.0.iter().find(|&&i| i as usize > n) {
            Some(&i) => Err(Error::IndexOutOfRange {
                index: i as usize,
                n,
            }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for TupleLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (pos, i) in self.0.iter().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str(")")
    }
}

/// Bit mask of the indices, or `None` when an index repeats.
fn index_mask(indices: &[u8]) -> Option<u64> {
    let mut mask = 0u64;
    for &i in indices {
        let bit = 1u64 << (i - 1);
        if mask & bit != 0 {
            return None;
        }
        mask |= bit;
    }
    Some(mask)
}

/// A product of tuple letters, stored as the concatenation of their indices.
///
/// Only repeat-free monomials are ever stored; the empty monomial is the unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u8>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    /// Builds a monomial from letters; `None` if the product vanishes in the ring.
    pub fn from_letters<'a>(letters: impl IntoIterator<Item = &'a TupleLetter>) -> Option<Self> {
        let mut flat = Vec::new();
        for letter in letters {
            flat.extend_from_slice(letter.raw());
        }
        index_mask(&flat).map(|_| Monomial(flat))
    }

    pub fn flat_indices(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self, arity: usize) -> usize {
        self.0.len() / arity
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self, arity: usize) -> impl Iterator<Item = TupleLetter> + '_ {
        self.0.chunks(arity).map(|c| TupleLetter(c.to_vec()))
    }

    fn mask(&self) -> u64 {
        self.0.iter().fold(0, |m, &i| m | 1u64 << (i - 1))
    }

    /// Renders as `e(1,2)e(3,4)`, or `1` for the unit.
    pub fn render(&self, arity: usize) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        self.letters(arity).map(|l| format!("e{l}")).collect()
    }
}

/// An element of `R_{n,k}` with exact integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateSeries {
    context: RingContext,
    terms: BTreeMap<Monomial, BigInt>,
}

impl CoordinateSeries {
    pub fn zero(context: RingContext) -> Self {
        Self {
            context,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(context: RingContext) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::unit(), BigInt::one());
        Self { context, terms }
    }

    /// `coefficient * e_{letters[0]} e_{letters[1]} ...`; zero if an index repeats.
    pub fn monomial(
        context: RingContext,
        letters: &[TupleLetter],
        coefficient: impl Into<BigInt>,
    ) -> Result<Self> {
        for letter in letters {
            context.check_letter(letter)?;
        }
        let mut out = Self::zero(context);
        if let Some(m) = Monomial::from_letters(letters) {
            out.add_term(m, coefficient.into());
        }
        Ok(out)
    }

    pub fn context(&self) -> RingContext {
        self.context
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, monomial: &Monomial) -> BigInt {
        self.terms.get(monomial).cloned().unwrap_or_default()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coefficient(&Monomial::unit())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    /// Shortest nonconstant monomial length, if any.
    pub fn min_nonconstant_length(&self) -> Option<usize> {
        self.terms
            .keys()
            .filter(|m| !m.is_unit())
            .map(|m| m.len(self.context.arity))
            .min()
    }

    fn add_term(&mut self, monomial: Monomial, coefficient: BigInt) {
        if coefficient.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(monomial) {
            Entry::Vacant(v) => {
                v.insert(coefficient);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coefficient;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same_context(&self, other: &Self) -> Result<()> {
        if self.context != other.context {
            return Err(Error::ContextMismatch {
                left: self.context,
                right: other.context,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_context(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-BigInt::one()))
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        let mut out = Self::zero(self.context);
        if factor.is_zero() {
            return out;
        }
        out.terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c * factor))
            .collect();
        out
    }

    /// Concatenation product; monomials with a repeated index are dropped.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_context(other)?;
        let right: Vec<(u64, &Monomial, &BigInt)> =
            other.terms.iter().map(|(m, c)| (m.mask(), m, c)).collect();
        let mut out = Self::zero(self.context);
        for (lm, lc) in &self.terms {
            let lmask = lm.mask();
            for &(rmask, rm, rc) in &right {
                if lmask & rmask != 0 {
                    continue;
                }
                let mut flat = Vec::with_capacity(lm.0.len() + rm.0.len());
                flat.extend_from_slice(&lm.0);
                flat.extend_from_slice(&rm.0);
                out.add_term(Monomial(flat), lc * rc);
            }
        }
        Ok(out)
    }

    /// `(1 + e_g)^m = 1 + m e_g`, or `1` when `g` repeats an index.
    pub fn unit_power(context: RingContext, letter: &TupleLetter, exponent: &BigInt) -> Result<Self> {
        context.check_letter(letter)?;
        let mut out = Self::one(context);
        if !letter.is_null() {
            out.add_term(Monomial(letter.raw().to_vec()), exponent.clone());
        }
        Ok(out)
    }

    /// Right multiplication by `unit_power(letter, exponent)` without building the factor.
    pub(crate) fn mul_unit_power_in_place(&mut self, letter: &TupleLetter, exponent: &BigInt) {
        if exponent.is_zero() {
            return;
        }
        let Some(gmask) = index_mask(letter.raw()) else {
            return;
        };
        let max_flat = self.context.max_length() * self.context.arity;
        let mut added = Vec::new();
        for (m, c) in &self.terms {
            if m.0.len() + letter.raw().len() > max_flat || m.mask() & gmask != 0 {
                continue;
            }
            let mut flat = Vec::with_capacity(m.0.len() + letter.raw().len());
            flat.extend_from_slice(&m.0);
            flat.extend_from_slice(letter.raw());
            added.push((Monomial(flat), c * exponent));
        }
        for (m, c) in added {
            self.add_term(m, c);
        }
    }

    /// Two-sided inverse of an element with constant term 1.
    ///
    /// With `u = 1 - x` and `x` nilpotent of order at most `floor(n/k) + 1`,
    /// `u^-1 = 1 + x + x^2 + ...` terminates.
    pub fn inverse(&self) -> Result<Self> {
        let constant = self.constant_term();
        if !constant.is_one() {
            return Err(Error::NotUnipotent(constant.to_string()));
        }
        let one = Self::one(self.context);
        let x = one.sub(self)?;
        let mut result = one.clone();
        let mut power = one;
        for _ in 0..self.context.max_length() {
            power = power.mul(&x)?;
            if power.is_zero() {
                break;
            }
            result = result.add(&power)?;
        }
        Ok(result)
    }

    /// Ring exponentiation by repeated squaring; negative powers go through the inverse.
    pub fn pow(&self, exponent: &BigInt) -> Result<Self> {
        let base = if exponent.is_negative() {
            self.inverse()?
        } else {
            self.clone()
        };
        let mut e = exponent.abs();
        let mut acc = Self::one(self.context);
        let mut sq = base;
        while !e.is_zero() {
            if e.is_odd() {
                acc = acc.mul(&sq)?;
            }
            e >>= 1;
            if !e.is_zero() {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Group commutator `u^-1 v^-1 u v` of two units.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.inverse()?
            .mul(&other.inverse()?)?
            .mul(self)?
            .mul(other)
    }

    /// Coefficients reduced into `0..p`, dropping those divisible by `p`.
    pub fn reduce_mod(&self, p: u64) -> Self {
        let modulus = BigInt::from(p);
        let mut out = Self::zero(self.context);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mod_floor(&modulus));
        }
        out
    }

    /// Coefficient map keyed by rendered monomials, for reports.
    pub fn to_coefficient_map(&self) -> BTreeMap<String, String> {
        self.terms
            .iter()
            .map(|(m, c)| (m.render(self.context.arity), c.to_string()))
            .collect()
    }
}

impl fmt::Display for CoordinateSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let (sign, magnitude) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if m.is_unit() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                f.write_str(&m.render(self.context.arity))?;
            } else {
                write!(f, "{magnitude}*{}", m.render(self.context.arity))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: usize, k: usize) -> RingContext {
        RingContext::new(n, k).unwrap()
    }

    fn letter(ix: &[usize]) -> TupleLetter {
        TupleLetter::new(ix.iter().copied()).unwrap()
    }

    fn e(c: RingContext, letters: &[&[usize]], coeff: i64) -> CoordinateSeries {
        let ls: Vec<_> = letters.iter().map(|l| letter(l)).collect();
        CoordinateSeries::monomial(c, &ls, coeff).unwrap()
    }

    fn unit(c: RingContext, ix: &[usize], m: i64) -> CoordinateSeries {
        CoordinateSeries::unit_power(c, &letter(ix), &BigInt::from(m)).unwrap()
    }

    #[test]
    fn square_of_generator_is_linear() {
        let c = ctx(2, 1);
        let g = unit(c, &[1], 1);
        let expected = CoordinateSeries::one(c).add(&e(c, &[&[1]], 2)).unwrap();
        assert_eq!(g.mul(&g).unwrap(), expected);
    }

    #[test]
    fn unit_law() {
        let c = ctx(3, 2);
        let g = unit(c, &[1, 2], 1);
        assert_eq!(g.mul(&CoordinateSeries::one(c)).unwrap(), g);
        assert_eq!(CoordinateSeries::one(c).mul(&g).unwrap(), g);
    }

    #[test]
    fn commutator_of_two_coordinates() {
        let c = ctx(2, 1);
        let product = [unit(c, &[1], -1), unit(c, &[2], -1), unit(c, &[1], 1), unit(c, &[2], 1)]
            .iter()
            .try_fold(CoordinateSeries::one(c), |acc, f| acc.mul(f))
            .unwrap();
        let expected = CoordinateSeries::one(c)
            .add(&e(c, &[&[1], &[2]], 1))
            .unwrap()
            .sub(&e(c, &[&[2], &[1]], 1))
            .unwrap();
        assert_eq!(product, expected);
        assert_eq!(product.to_string(), "1 + e(1)e(2) - e(2)e(1)");
    }

    #[test]
    fn unit_power_examples() {
        let c = ctx(3, 2);
        let expected = CoordinateSeries::one(c).add(&e(c, &[&[1, 2]], 6)).unwrap();
        assert_eq!(unit(c, &[1, 2], 6), expected);
        assert!(unit(c, &[1, 1], 5).is_one());
        assert!(unit(ctx(3, 1), &[3], 0).is_one());
    }

    #[test]
    fn inverse_examples() {
        let c = ctx(2, 1);
        assert_eq!(unit(c, &[1], 1).inverse().unwrap(), unit(c, &[1], -1));
        assert!(CoordinateSeries::one(c).inverse().unwrap().is_one());
        let u = CoordinateSeries::one(c).add(&e(c, &[&[1], &[2]], 1)).unwrap();
        let expected = CoordinateSeries::one(c).sub(&e(c, &[&[1], &[2]], 1)).unwrap();
        assert_eq!(u.inverse().unwrap(), expected);
    }

    #[test]
    fn inverse_rejects_non_unipotent() {
        let c = ctx(2, 1);
        let two = CoordinateSeries::one(c).scale(&BigInt::from(2));
        assert!(matches!(two.inverse(), Err(Error::NotUnipotent(_))));
        assert!(matches!(CoordinateSeries::zero(c).inverse(), Err(Error::NotUnipotent(_))));
    }

    #[test]
    fn context_mismatch_rejected() {
        let a = CoordinateSeries::one(ctx(3, 1));
        let b = CoordinateSeries::one(ctx(3, 2));
        assert!(matches!(a.mul(&b), Err(Error::ContextMismatch { .. })));
        let c = CoordinateSeries::one(ctx(4, 1));
        assert!(matches!(a.mul(&c), Err(Error::ContextMismatch { .. })));
    }

    #[test]
    fn letter_validation() {
        assert!(matches!(TupleLetter::new([]), Err(Error::EmptyLetter)));
        assert!(matches!(TupleLetter::new([0]), Err(Error::IndexOutOfRange { .. })));
        let c = ctx(3, 2);
        assert!(matches!(
            CoordinateSeries::unit_power(c, &letter(&[1, 4]), &BigInt::one()),
            Err(Error::IndexOutOfRange { index: 4, n: 3 })
        ));
        assert!(matches!(
            CoordinateSeries::unit_power(c, &letter(&[1]), &BigInt::one()),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(RingContext::new(3, 0).is_err());
        assert!(RingContext::new(65, 1).is_err());
    }

    /// All repeat-free monomials in `R_{n,k}`, by brute force over index sequences.
    fn enumerate_basis(c: RingContext) -> Vec<Monomial> {
        fn extend(c: RingContext, flat: &mut Vec<u8>, remaining: usize, out: &mut Vec<Monomial>) {
            if remaining == 0 {
                if flat.len() % c.arity == 0 && index_mask(flat).is_some() {
                    out.push(Monomial(flat.clone()));
                }
                return;
            }
            for i in 1..=c.n as u8 {
                flat.push(i);
                extend(c, flat, remaining - 1, out);
                flat.pop();
            }
        }
        let mut out = Vec::new();
        for s in 0..=c.max_length() {
            extend(c, &mut Vec::new(), s * c.arity, &mut out);
        }
        out
    }

    #[test]
    fn basis_dimension_matches_enumeration() {
        assert_eq!(ctx(4, 2).basis_dimension(), BigInt::from(37));
        for n in 1..=5 {
            for k in 1..=3 {
                let c = ctx(n, k);
                assert_eq!(
                    BigInt::from(enumerate_basis(c).len()),
                    c.basis_dimension(),
                    "n={n} k={k}"
                );
            }
        }
    }

    /// Every basis element, used as a spanning set for exhaustive associativity.
    fn basis_series(c: RingContext) -> Vec<CoordinateSeries> {
        enumerate_basis(c)
            .into_iter()
            .map(|m| {
                let mut s = CoordinateSeries::zero(c);
                s.add_term(m, BigInt::one());
                s
            })
            .collect()
    }

    #[test]
    fn associative_on_basis_triples() {
        for (n, k) in [(3, 1), (4, 2), (4, 1)] {
            let c = ctx(n, k);
            let basis = basis_series(c);
            for a in &basis {
                for b in &basis {
                    let ab = a.mul(b).unwrap();
                    for d in &basis {
                        assert_eq!(
                            ab.mul(d).unwrap(),
                            a.mul(&b.mul(d).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn in_place_unit_power_matches_mul() {
        let c = ctx(4, 1);
        let mut acc = CoordinateSeries::one(c);
        let mut reference = CoordinateSeries::one(c);
        for (i, m) in [(1, 2), (2, -1), (3, 3), (1, 1), (4, -2), (2, 5)] {
            let g = letter(&[i]);
            let m = BigInt::from(m);
            acc.mul_unit_power_in_place(&g, &m);
            reference = reference
                .mul(&CoordinateSeries::unit_power(c, &g, &m).unwrap())
                .unwrap();
            assert_eq!(acc, reference);
        }
    }

    #[test]
    fn overlapping_letters_commute() {
        let c = ctx(4, 2);
        let g = unit(c, &[1, 2], 1);
        let h = unit(c, &[2, 3], 1);
        assert_eq!(g.mul(&h).unwrap(), h.mul(&g).unwrap());
        assert!(g.commutator(&h).unwrap().is_one());
        let disjoint = unit(c, &[3, 4], 1);
        assert!(!g.commutator(&disjoint).unwrap().is_one());
    }

    #[test]
    fn pow_matches_unit_power() {
        let c = ctx(3, 1);
        let g = unit(c, &[2], 1);
        for m in -4..=4 {
            assert_eq!(g.pow(&BigInt::from(m)).unwrap(), unit(c, &[2], m));
        }
    }

    #[test]
    fn reduce_mod_drops_multiples() {
        let c = ctx(3, 1);
        let s = unit(c, &[1], 6).mul(&unit(c, &[2], -1)).unwrap();
        let r = s.reduce_mod(3);
        assert_eq!(r.coefficient(&Monomial::from_letters(&[letter(&[1])]).unwrap()), BigInt::zero());
        assert_eq!(r.coefficient(&Monomial::from_letters(&[letter(&[2])]).unwrap()), BigInt::from(2));
    }
}
