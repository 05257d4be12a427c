//! Word presentations of elements of `K_n(k)` and their evaluation in `R_{n,k}`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coordinate_ring::{CoordinateSeries, RingContext, TupleLetter};
use crate::error::{Error, Result};

/// Exponents used when sampling words for randomized identity checks.
pub const DEFAULT_EXPONENTS: [i64; 5] = [-2, -1, 1, 2, 3];

/// Seed used when no other seed is configured.
pub const DEFAULT_SEED: u64 = 0x6a68_6361_6c63;

/// A factor `g_A^m`. Power-map decorations are absorbed into `m` on construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorPower {
    pub letter: TupleLetter,
    pub exponent: BigInt,
}

impl GeneratorPower {
    pub fn new(letter: TupleLetter, exponent: impl Into<BigInt>) -> Self {
        Self {
            letter,
            exponent: exponent.into(),
        }
    }

    /// `{x_{i_1}^{[n_1]}|...|x_{i_k}^{[n_k]}}^m`, normalized to `g^{m n_1 ... n_k}`.
    pub fn decorated(
        letter: TupleLetter,
        exponent: impl Into<BigInt>,
        decorations: &[i64],
    ) -> Result<Self> {
        if decorations.len() != letter.arity() {
            return Err(Error::SizeMismatch {
                expected: letter.arity(),
                found: decorations.len(),
            });
        }
        let effective = decorations
            .iter()
            .fold(exponent.into(), |acc, &d| acc * BigInt::from(d));
        Ok(Self::new(letter, effective))
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.letter.clone(), -&self.exponent)
    }
}

impl fmt::Display for GeneratorPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (pos, i) in self.letter.indices().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")?;
        if !self.exponent.is_one() {
            write!(f, "^{}", self.exponent)?;
        }
        Ok(())
    }
}

/// A product of generator powers over a fixed `(n, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupWord {
    context: RingContext,
    factors: Vec<GeneratorPower>,
}

impl GroupWord {
    pub fn identity(context: RingContext) -> Self {
        Self {
            context,
            factors: Vec::new(),
        }
    }

    /// Validates every letter against the context and drops zero exponents.
    pub fn from_factors(
        context: RingContext,
        factors: impl IntoIterator<Item = GeneratorPower>,
    ) -> Result<Self> {
        let mut out = Vec::new();
        for factor in factors {
            context.check_letter(&factor.letter)?;
            if !factor.exponent.is_zero() {
                out.push(factor);
            }
        }
        Ok(Self {
            context,
            factors: out,
        })
    }

    pub fn generator(
        context: RingContext,
        letter: TupleLetter,
        exponent: impl Into<BigInt>,
    ) -> Result<Self> {
        Self::from_factors(context, [GeneratorPower::new(letter, exponent)])
    }

    /// The word `x_{i_1}^{m_1} x_{i_2}^{m_2} ...` in `K_n = K_n(1)`.
    pub fn coordinates(n: usize, factors: &[(usize, i64)]) -> Result<Self> {
        let context = RingContext::new(n, 1)?;
        let powers = factors
            .iter()
            .map(|&(i, m)| Ok(GeneratorPower::new(TupleLetter::single(i)?, m)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_factors(context, powers)
    }

    /// `x_1 x_2 ... x_n`.
    pub fn standard(n: usize) -> Result<Self> {
        let factors: Vec<_> = (1..=n).map(|i| (i, 1)).collect();
        Self::coordinates(n, &factors)
    }

    pub(crate) fn from_validated(context: RingContext, factors: Vec<GeneratorPower>) -> Self {
        Self { context, factors }
    }

    pub fn context(&self) -> RingContext {
        self.context
    }

    pub fn arity(&self) -> usize {
        self.context.arity
    }

    pub fn factors(&self) -> &[GeneratorPower] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Same factors viewed in a context with more coordinates.
    pub fn widen(&self, n: usize) -> Result<Self> {
        Self::from_factors(RingContext::new(n, self.context.arity)?, self.factors.clone())
    }

    pub fn concat(&self, other: &GroupWord) -> Result<GroupWord> {
        if self.context != other.context {
            return Err(Error::ContextMismatch {
                left: self.context,
                right: other.context,
            });
        }
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Ok(Self::from_validated(self.context, factors))
    }

    /// Free-group inverse: reversed order, negated exponents.
    pub fn inverse(&self) -> GroupWord {
        let factors = self.factors.iter().rev().map(GeneratorPower::inverse).collect();
        Self::from_validated(self.context, factors)
    }

    /// The word repeated `|m|` times, inverted first when `m < 0`.
    pub fn power(&self, m: i64) -> GroupWord {
        let base = if m < 0 { self.inverse() } else { self.clone() };
        let mut factors = Vec::with_capacity(base.len() * m.unsigned_abs() as usize);
        for _ in 0..m.unsigned_abs() {
            factors.extend(base.factors.iter().cloned());
        }
        Self::from_validated(self.context, factors)
    }

    /// Evaluation in the coordinate ring: the ordered product of `(1 + e_g)^m`.
    pub fn rho(&self) -> CoordinateSeries {
        let mut acc = CoordinateSeries::one(self.context);
        for factor in &self.factors {
            acc.mul_unit_power_in_place(&factor.letter, &factor.exponent);
        }
        acc
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (pos, factor) in self.factors.iter().enumerate() {
            if pos > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

/// Left-normed commutator `[[w_1, w_2, ..., w_l] = [...[w_1, w_2], ...], w_l]`
/// with `[x, y] = x^-1 y^-1 x y`, fully expanded.
pub fn commutator(words: &[GroupWord]) -> Result<GroupWord> {
    let (first, rest) = match words {
        [first, rest @ ..] if !rest.is_empty() => (first, rest),
        _ => return Err(Error::TooFewCommutatorEntries(words.len())),
    };
    rest.iter().try_fold(first.clone(), |acc, next| {
        acc.inverse()
            .concat(&next.inverse())?
            .concat(&acc)?
            .concat(next)
    })
}

/// How exponents are drawn for sampled words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentSampling {
    pub exponents: Vec<i64>,
    pub seed: u64,
}

impl Default for ExponentSampling {
    fn default() -> Self {
        Self {
            exponents: DEFAULT_EXPONENTS.to_vec(),
            seed: DEFAULT_SEED,
        }
    }
}

impl ExponentSampling {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub(crate) fn draw(&self, rng: &mut impl Rng) -> i64 {
        *self.exponents.choose(rng).unwrap_or(&1)
    }
}

/// Left-normed commutators of weight `c` on the coordinates `x_1..x_n`.
///
/// Index sequences are enumerated in lexicographic order, those with pairwise
/// distinct indices first, then the rest; sequences with `i_1 = i_2` are
/// skipped since their commutator is trivially 1. The first pass uses unit
/// exponents; later passes repeat the sequences with exponents drawn from
/// `sampling`, until `size` words have been produced.
pub fn gamma_test_elements(
    n: usize,
    c: usize,
    size: usize,
    sampling: &ExponentSampling,
) -> Result<Vec<GroupWord>> {
    if c < 2 {
        return Err(Error::Config(format!(
            "lower central series test elements need class >= 2, got {c}"
        )));
    }
    RingContext::new(n, 1)?;
    let sequences = index_sequences(n, c);
    if sequences.is_empty() {
        return Ok(Vec::new());
    }
    let mut rng = sampling.rng();
    let mut out = Vec::with_capacity(size);
    let mut pass = 0usize;
    while out.len() < size {
        for seq in &sequences {
            if out.len() >= size {
                break;
            }
            let entries = seq
                .iter()
                .map(|&i| {
                    let m = if pass == 0 { 1 } else { sampling.draw(&mut rng) };
                    GroupWord::coordinates(n, &[(i, m)])
                })
                .collect::<Result<Vec<_>>>()?;
            out.push(commutator(&entries)?);
        }
        pass += 1;
    }
    Ok(out)
}

fn index_sequences(n: usize, c: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(c);
    fn extend(n: usize, c: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == c {
            out.push(current.clone());
            return;
        }
        for i in 1..=n {
            if current.len() == 1 && current[0] == i {
                continue;
            }
            current.push(i);
            extend(n, c, current, out);
            current.pop();
        }
    }
    extend(n, c, &mut current, &mut out);
    let (mut distinct, repeated): (Vec<_>, Vec<_>) = out.into_iter().partition(|seq| {
        let mut seen = 0u64;
        seq.iter().all(|&i| {
            let fresh = seen & (1 << i) == 0;
            seen |= 1 << i;
            fresh
        })
    });
    distinct.extend(repeated);
    distinct
}

/// A random word in `x_1..x_n` with `len` factors.
pub fn random_coordinate_word(
    n: usize,
    len: usize,
    sampling: &ExponentSampling,
    rng: &mut impl Rng,
) -> Result<GroupWord> {
    let factors: Vec<(usize, i64)> = (0..len)
        .map(|_| (rng.gen_range(1..=n), sampling.draw(rng)))
        .collect();
    GroupWord::coordinates(n, &factors)
}

/// Parses the plain-text word syntax.
///
/// `{1,2}^3 {2,4}^-1` is `g_(1,2)^3 g_(2,4)^-1`; `[w1, w2, ...]` is the
/// left-normed commutator; `(w)^m` raises a subword to a power. Arity is taken
/// from the first letter (1 for an empty word).
pub fn parse_word(text: &str, n: usize) -> Result<GroupWord> {
    let mut parser = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        n,
        arity: None,
    };
    let word = parser.word()?;
    parser.skip_ws();
    if parser.pos != parser.bytes.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(word)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    n: usize,
    arity: Option<usize>,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", byte as char)))
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.bytes.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                position: start,
                message: "expected an integer".to_string(),
            })
    }

    fn context(&mut self) -> Result<RingContext> {
        RingContext::new(self.n, self.arity.unwrap_or(1))
    }

    fn word(&mut self) -> Result<GroupWord> {
        let mut factors: Vec<GroupWord> = Vec::new();
        while let Some(b) = self.peek() {
            if !matches!(b, b'{' | b'[' | b'(') {
                break;
            }
            factors.push(self.item()?);
        }
        let context = self.context()?;
        factors
            .iter()
            .try_fold(GroupWord::identity(context), |acc, w| acc.concat(w))
    }

    fn exponent(&mut self) -> Result<i64> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.integer()
        } else {
            Ok(1)
        }
    }

    fn item(&mut self) -> Result<GroupWord> {
        match self.peek() {
            Some(b'{') => {
                self.pos += 1;
                let mut indices = Vec::new();
                loop {
                    let i = self.integer()?;
                    if i < 1 {
                        return Err(self.error("coordinate indices start at 1"));
                    }
                    indices.push(i as usize);
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b'}') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.error("expected ',' or '}'")),
                    }
                }
                match self.arity {
                    None => self.arity = Some(indices.len()),
                    Some(a) if a != indices.len() => {
                        return Err(Error::ArityMismatch {
                            expected: a,
                            found: indices.len(),
                        })
                    }
                    Some(_) => {}
                }
                let m = self.exponent()?;
                GroupWord::generator(self.context()?, TupleLetter::new(indices)?, m)
            }
            Some(b'[') => {
                self.pos += 1;
                let mut entries = vec![self.word()?];
                while self.peek() == Some(b',') {
                    self.pos += 1;
                    entries.push(self.word()?);
                }
                self.expect(b']')?;
                let m = self.exponent()?;
                Ok(commutator(&entries)?.power(m))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.word()?;
                self.expect(b')')?;
                let m = self.exponent()?;
                Ok(inner.power(m))
            }
            _ => Err(self.error("expected '{', '[' or '('")),
        }
    }
}
