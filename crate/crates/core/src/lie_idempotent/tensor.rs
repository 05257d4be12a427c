//! Weight-homogeneous tensors over a graded alphabet and the symmetric-group action.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::Field;
use crate::error::{Error, Result};

/// Basis letters of `H̄_*(X)`, each with an internal degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedAlphabet {
    letters: Vec<(String, u32)>,
}

impl GradedAlphabet {
    pub fn new(letters: Vec<(String, u32)>) -> Result<Self> {
        for (pos, (name, _)) in letters.iter().enumerate() {
            if letters[..pos].iter().any(|(other, _)| other == name) {
                return Err(Error::Config(format!("duplicate letter name '{name}'")));
            }
        }
        if letters.len() > u16::MAX as usize {
            return Err(Error::Config("alphabet too large".to_string()));
        }
        Ok(Self { letters })
    }

    /// `d` letters `x1..xd`, all of the same degree.
    pub fn uniform(d: usize, degree: u32) -> Self {
        Self {
            letters: (1..=d).map(|i| (format!("x{i}"), degree)).collect(),
        }
    }

    /// `counts[deg]` letters in each degree, named `a{deg}_{i}`.
    pub fn from_degree_counts(counts: &[usize]) -> Self {
        let mut letters = Vec::new();
        for (degree, &count) in counts.iter().enumerate() {
            for i in 1..=count {
                letters.push((format!("a{degree}_{i}"), degree as u32));
            }
        }
        Self { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn degree(&self, letter: u16) -> u32 {
        self.letters[letter as usize].1
    }

    pub fn name(&self, letter: u16) -> &str {
        &self.letters[letter as usize].0
    }

    pub fn word_degree(&self, word: &[u16]) -> u64 {
        word.iter().map(|&l| self.degree(l) as u64).sum()
    }

    pub fn has_odd_letter(&self) -> bool {
        self.letters.iter().any(|(_, d)| d % 2 == 1)
    }

    pub fn render(&self, word: &[u16]) -> String {
        word.iter().map(|&l| self.name(l)).collect::<Vec<_>>().join("⊗")
    }
}

/// Whether coordinate permutations pick up Koszul signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignMode {
    Graded,
    Ungraded,
}

impl fmt::Display for SignMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignMode::Graded => f.write_str("graded"),
            SignMode::Ungraded => f.write_str("ungraded"),
        }
    }
}

/// A permutation of `n` coordinates. Position `i` is sent to position `image(i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// From one-based images `sigma(1), ..., sigma(n)`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in images {
            if i == 0 || i > n || seen[i - 1] {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            seen[i - 1] = true;
        }
        Ok(Self {
            images: images.iter().map(|i| i - 1).collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// The cycle `(1, 2, ..., n)`: `i -> i + 1`, `n -> 1`.
    pub fn cycle(n: usize) -> Self {
        Self {
            images: (0..n).map(|i| (i + 1) % n).collect(),
        }
    }

    /// The transposition `(i, j)`, one-based.
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::InvalidPermutation(format!("({i},{j}) in S_{n}")));
        }
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i - 1, j - 1);
        Ok(Self { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Image word and Koszul sign: each pair of letters whose order is
    /// reversed contributes `(-1)^{|a||b|}`.
    pub fn act(&self, word: &[u16], alphabet: &GradedAlphabet, mode: SignMode) -> (Vec<u16>, i64) {
        let mut out = vec![0u16; word.len()];
        for (i, &letter) in word.iter().enumerate() {
            out[self.images[i]] = letter;
        }
        let mut sign = 1;
        if mode == SignMode::Graded {
            for i in 0..word.len() {
                if alphabet.degree(word[i]) % 2 == 0 {
                    continue;
                }
                for j in i + 1..word.len() {
                    if self.images[i] > self.images[j] && alphabet.degree(word[j]) % 2 == 1 {
                        sign = -sign;
                    }
                }
            }
        }
        (out, sign)
    }
}

/// Sparse element of the weight-`n` component `V^{⊗n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorElement<F: Field> {
    field: F,
    weight: usize,
    terms: BTreeMap<Vec<u16>, F::Elem>,
}

impl<F: Field> TensorElement<F> {
    pub fn zero(field: F, weight: usize) -> Self {
        Self {
            field,
            weight,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(field: F, word: Vec<u16>) -> Self {
        let mut out = Self::zero(field, word.len());
        let one = out.field.one();
        out.add_term(word, one);
        out
    }

    /// Linear combination with integer coefficients, reduced into the field.
    pub fn from_integer_terms(field: F, weight: usize, terms: &BTreeMap<Vec<u16>, i64>) -> Self {
        let mut out = Self::zero(field, weight);
        for (word, &c) in terms {
            let c = out.field.from_integer(c);
            out.add_term(word.clone(), c);
        }
        out
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &F::Elem)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, word: Vec<u16>, coefficient: F::Elem) {
        debug_assert_eq!(word.len(), self.weight);
        if self.field.is_zero(&coefficient) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(word) {
            Entry::Vacant(v) => {
                v.insert(coefficient);
            }
            Entry::Occupied(mut o) => {
                let sum = self.field.add(o.get(), &coefficient);
                if self.field.is_zero(&sum) {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, factor: &F::Elem) -> Self {
        let mut out = Self::zero(self.field.clone(), self.weight);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), self.field.mul(c, factor));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), self.field.neg(c));
        }
        out
    }

    pub fn render(&self, alphabet: &GradedAlphabet) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (w, c) in &self.terms {
            let c = c.to_string();
            let (negative, magnitude) = match c.strip_prefix('-') {
                Some(m) => (true, m),
                None => (false, c.as_str()),
            };
            match (out.is_empty(), negative) {
                (true, true) => out.push('-'),
                (true, false) => {}
                (false, true) => out.push_str(" - "),
                (false, false) => out.push_str(" + "),
            }
            if magnitude != "1" {
                out.push_str(magnitude);
                out.push('*');
            }
            out.push_str(&alphabet.render(w));
        }
        out
    }
}

/// Coordinate permutation of a tensor, with Koszul signs in graded mode.
pub fn permute<F: Field>(
    sigma: &Permutation,
    tensor: &TensorElement<F>,
    alphabet: &GradedAlphabet,
    mode: SignMode,
) -> Result<TensorElement<F>> {
    if sigma.len() != tensor.weight {
        return Err(Error::SizeMismatch {
            expected: tensor.weight,
            found: sigma.len(),
        });
    }
    let field = tensor.field.clone();
    let mut out = TensorElement::zero(field.clone(), tensor.weight);
    for (word, c) in &tensor.terms {
        let (image, sign) = sigma.act(word, alphabet, mode);
        out.add_term(image, field.mul(c, &field.from_integer(sign)));
    }
    Ok(out)
}

/// All words of length `n` over `d` letters with the given letter counts, in
/// lexicographic order.
pub(crate) fn words_with_content(counts: &[usize]) -> Vec<Vec<u16>> {
    let n: usize = counts.iter().sum();
    let mut remaining = counts.to_vec();
    let mut current = Vec::with_capacity(n);
    let mut out = Vec::new();
    fn extend(remaining: &mut [usize], current: &mut Vec<u16>, n: usize, out: &mut Vec<Vec<u16>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for letter in 0..remaining.len() {
            if remaining[letter] > 0 {
                remaining[letter] -= 1;
                current.push(letter as u16);
                extend(remaining, current, n, out);
                current.pop();
                remaining[letter] += 1;
            }
        }
    }
    extend(&mut remaining, &mut current, n, &mut out);
    out
}

/// Every way to write `n` as an ordered sum of `d` nonnegative parts.
pub(crate) fn contents(n: usize, d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in (0..=n).rev() {
        for mut rest in contents(n - first, d - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
