//! The Dynkin-type operator `β_n` on `V^{⊗n}`, its idempotency, and Lie ranks.

mod field;
mod tensor;
mod witt;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

pub use field::{bareiss_rank, is_prime, Coefficients, Field, PrimeField, Rationals};
pub use tensor::{permute, GradedAlphabet, Permutation, SignMode, TensorElement};
pub use witt::{lie_dimensions, mobius, witt};

use crate::error::{Error, Result};
use tensor::{contents, words_with_content};

/// `β_n` applied to one basis word, with integer coefficients.
///
/// Built from `β_1 = id` by `β_m = (β_{m-1} ∧ 1) - (1, 2, ..., m) ∘ (β_{m-1} ∧ 1)`,
/// so that `β_2 = id - (1, 2)` and `β_n(x_1 ⊗ ... ⊗ x_n) = [[x_1, x_2], ..., x_n]`.
pub fn beta_word(word: &[u16], alphabet: &GradedAlphabet, mode: SignMode) -> BTreeMap<Vec<u16>, i64> {
    let mut terms = BTreeMap::new();
    let Some((&first, rest)) = word.split_first() else {
        terms.insert(Vec::new(), 1);
        return terms;
    };
    terms.insert(vec![first], 1);
    for (step, &letter) in rest.iter().enumerate() {
        let cycle = Permutation::cycle(step + 2);
        let mut next: BTreeMap<Vec<u16>, i64> = BTreeMap::new();
        for (prefix, c) in terms {
            let mut extended = prefix;
            extended.push(letter);
            let (image, sign) = cycle.act(&extended, alphabet, mode);
            *next.entry(extended).or_default() += c;
            *next.entry(image).or_default() -= c * sign;
        }
        next.retain(|_, c| *c != 0);
        terms = next;
    }
    terms
}

/// The operator `β_n` on weight-`n` tensors over a fixed alphabet and sign mode.
#[derive(Debug, Clone)]
pub struct Beta {
    n: usize,
    alphabet: GradedAlphabet,
    mode: SignMode,
}

impl Beta {
    pub fn new(n: usize, alphabet: GradedAlphabet, mode: SignMode) -> Result<Self> {
        if n < 2 {
            return Err(Error::BetaWeight(n));
        }
        Ok(Self { n, alphabet, mode })
    }

    pub fn weight(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> &GradedAlphabet {
        &self.alphabet
    }

    pub fn mode(&self) -> SignMode {
        self.mode
    }

    pub fn apply<F: Field>(&self, t: &TensorElement<F>) -> Result<TensorElement<F>> {
        if t.weight() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: t.weight(),
            });
        }
        let field = t.field().clone();
        let mut out = TensorElement::zero(field.clone(), self.n);
        for (word, c) in t.terms() {
            self.check_word(word)?;
            for (image, k) in beta_word(word, &self.alphabet, self.mode) {
                out.add_term(image, field.mul(c, &field.from_integer(k)));
            }
        }
        Ok(out)
    }

    /// `β_n(β_n(w)) - n β_n(w)` with integer coefficients.
    fn square_defect(&self, word: &[u16]) -> BTreeMap<Vec<u16>, i64> {
        let once = beta_word(word, &self.alphabet, self.mode);
        let mut defect: BTreeMap<Vec<u16>, i64> = BTreeMap::new();
        for (v, c) in &once {
            for (image, k) in beta_word(v, &self.alphabet, self.mode) {
                *defect.entry(image).or_default() += c * k;
            }
            *defect.entry(v.clone()).or_default() -= self.n as i64 * c;
        }
        defect.retain(|_, c| *c != 0);
        defect
    }

    fn check_word(&self, word: &[u16]) -> Result<()> {
        match word.iter().find(|&&l| l as usize >= self.alphabet.len()) {
            Some(&l) => Err(Error::IndexOutOfRange {
                index: l as usize,
                n: self.alphabet.len(),
            }),
            None => Ok(()),
        }
    }
}

pub fn beta<F: Field>(
    n: usize,
    t: &TensorElement<F>,
    alphabet: &GradedAlphabet,
    mode: SignMode,
) -> Result<TensorElement<F>> {
    Beta::new(n, alphabet.clone(), mode)?.apply(t)
}

/// A basis word on which `β_n ∘ β_n` and `n β_n` differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdempotencyFailure {
    pub word: String,
    pub lhs: BTreeMap<String, String>,
    pub rhs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdempotencyVerdict {
    pub holds: bool,
    pub words_checked: usize,
    pub counterexample: Option<IdempotencyFailure>,
}

fn all_words(n: usize, d: usize) -> Vec<Vec<u16>> {
    contents(n, d)
        .into_iter()
        .flat_map(|c| words_with_content(&c))
        .collect()
}

fn coefficient_map<F: Field>(t: &TensorElement<F>, alphabet: &GradedAlphabet) -> BTreeMap<String, String> {
    t.terms().map(|(w, c)| (alphabet.render(w), c.to_string())).collect()
}

/// Checks `β_n(β_n(w)) = n β_n(w)` on every basis word of weight `n`.
pub fn check_idempotent<F: Field>(
    n: usize,
    alphabet: &GradedAlphabet,
    mode: SignMode,
    field: &F,
) -> Result<IdempotencyVerdict> {
    let beta = Beta::new(n, alphabet.clone(), mode)?;
    let words = all_words(n, alphabet.len());
    let failure = words.par_iter().find_first(|word| {
        let defect = TensorElement::from_integer_terms(field.clone(), n, &beta.square_defect(word));
        !defect.is_zero()
    });
    let counterexample = match failure {
        Some(word) => {
            let once = beta.apply(&TensorElement::basis(field.clone(), word.clone()))?;
            let twice = beta.apply(&once)?;
            let scaled = once.scale(&field.from_integer(n as i64));
            Some(IdempotencyFailure {
                word: alphabet.render(word),
                lhs: coefficient_map(&twice, alphabet),
                rhs: coefficient_map(&scaled, alphabet),
            })
        }
        None => None,
    };
    Ok(IdempotencyVerdict {
        holds: counterexample.is_none(),
        words_checked: words.len(),
        counterexample,
    })
}

/// Matrix of `β_n` on one content block: row `i` is the image of word `i`.
fn block_matrix(beta: &Beta, words: &[Vec<u16>]) -> Vec<Vec<i64>> {
    let index: BTreeMap<&Vec<u16>, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    words
        .par_iter()
        .map(|w| {
            let mut row = vec![0i64; words.len()];
            for (image, c) in beta_word(w, &beta.alphabet, beta.mode) {
                row[index[&image]] = c;
            }
            row
        })
        .collect()
}

fn check_invertible<F: Field>(n: usize, field: &F) -> Result<()> {
    let p = field.characteristic();
    if p != 0 && n as u64 % p == 0 {
        return Err(Error::CharacteristicDividesWeight { p, n });
    }
    Ok(())
}

/// Squares the matrix of `(1/n) β_n` block by block and compares with itself.
pub fn idempotent_by_matrix<F: Field>(
    n: usize,
    alphabet: &GradedAlphabet,
    mode: SignMode,
    field: &F,
) -> Result<bool> {
    check_invertible(n, field)?;
    let beta = Beta::new(n, alphabet.clone(), mode)?;
    let inv_n = field
        .inverse(&field.from_integer(n as i64))
        .ok_or(Error::CharacteristicDividesWeight {
            p: field.characteristic(),
            n,
        })?;
    for content in contents(n, alphabet.len()) {
        let words = words_with_content(&content);
        let e: Vec<Vec<F::Elem>> = block_matrix(&beta, &words)
            .iter()
            .map(|row| row.iter().map(|&c| field.mul(&field.from_integer(c), &inv_n)).collect())
            .collect();
        let size = words.len();
        for i in 0..size {
            for j in 0..size {
                let mut sum = field.zero();
                for (k, e_ik) in e[i].iter().enumerate() {
                    if !field.is_zero(e_ik) {
                        sum = field.add(&sum, &field.mul(e_ik, &e[k][j]));
                    }
                }
                if sum != e[i][j] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Rank of `β_n`, in total and split by internal degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LieRank {
    pub total: usize,
    pub by_degree: BTreeMap<u64, usize>,
}

/// Rank of `β_n` on the weight-`n` component. `β_1` is taken to be the identity.
pub fn lie_rank<F: Field>(n: usize, alphabet: &GradedAlphabet, field: &F, mode: SignMode) -> Result<LieRank> {
    lie_rank_up_to_degree(n, alphabet, field, mode, None)
}

/// As [`lie_rank`], skipping content blocks whose internal degree exceeds `max_degree`.
pub fn lie_rank_up_to_degree<F: Field>(
    n: usize,
    alphabet: &GradedAlphabet,
    field: &F,
    mode: SignMode,
    max_degree: Option<u64>,
) -> Result<LieRank> {
    if n == 0 {
        return Err(Error::BetaWeight(0));
    }
    check_invertible(n, field)?;
    let blocks: Vec<Vec<usize>> = contents(n, alphabet.len())
        .into_iter()
        .filter(|c| {
            let degree: u64 = c.iter().enumerate().map(|(l, &m)| m as u64 * alphabet.degree(l as u16) as u64).sum();
            max_degree.map_or(true, |max| degree <= max)
        })
        .collect();
    let ranks: Vec<(u64, usize)> = if n == 1 {
        blocks
            .iter()
            .map(|c| {
                let letter = c.iter().position(|&m| m == 1).expect("weight-one content");
                (alphabet.degree(letter as u16) as u64, 1)
            })
            .collect()
    } else {
        let beta = Beta::new(n, alphabet.clone(), mode)?;
        blocks
            .par_iter()
            .map(|c| {
                let words = words_with_content(c);
                let degree = alphabet.word_degree(&words[0]);
                (degree, field.rank_of_integer_matrix(&block_matrix(&beta, &words)))
            })
            .collect()
    };
    let mut by_degree = BTreeMap::new();
    let mut total = 0;
    for (degree, rank) in ranks {
        if rank > 0 {
            *by_degree.entry(degree).or_default() += rank;
            total += rank;
        }
    }
    Ok(LieRank { total, by_degree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    fn integer_tensor(terms: &[(&[u16], i64)], n: usize) -> TensorElement<Rationals> {
        let map: BTreeMap<Vec<u16>, i64> = terms.iter().map(|(w, c)| (w.to_vec(), *c)).collect();
        TensorElement::from_integer_terms(Rationals, n, &map)
    }

    /// Left-normed bracket `[[x_1, x_2], ..., x_n]` expanded independently:
    /// `[u, x] = u x - (-1)^{|u||x|} x u` on each word of `u`.
    fn bracket_oracle(word: &[u16], alphabet: &GradedAlphabet, mode: SignMode) -> BTreeMap<Vec<u16>, i64> {
        let mut terms: BTreeMap<Vec<u16>, i64> = BTreeMap::new();
        terms.insert(vec![word[0]], 1);
        for &x in &word[1..] {
            let mut next: BTreeMap<Vec<u16>, i64> = BTreeMap::new();
            let x_odd = alphabet.degree(x) % 2 == 1;
            for (u, c) in terms {
                let u_odd = alphabet.word_degree(&u) % 2 == 1;
                let sign = if mode == SignMode::Graded && u_odd && x_odd { -1 } else { 1 };
                let mut right = u.clone();
                right.push(x);
                let mut left = vec![x];
                left.extend(&u);
                *next.entry(right).or_default() += c;
                *next.entry(left).or_default() -= sign * c;
            }
            next.retain(|_, c| *c != 0);
            terms = next;
        }
        terms
    }

    #[test]
    fn beta2_examples() {
        let alphabet = GradedAlphabet::new(vec![("a".into(), 1), ("b".into(), 1)]).unwrap();
        let ab = TensorElement::basis(Rationals, vec![0, 1]);
        let image = beta(2, &ab, &alphabet, SignMode::Ungraded).unwrap();
        assert_eq!(image, integer_tensor(&[(&[0, 1], 1), (&[1, 0], -1)], 2));
        let aa = TensorElement::basis(Rationals, vec![0, 0]);
        assert!(beta(2, &aa, &alphabet, SignMode::Ungraded).unwrap().is_zero());
        // odd a: [a, a] = 2 a⊗a
        let image = beta(2, &aa, &alphabet, SignMode::Graded).unwrap();
        assert_eq!(image, aa.scale(&q(2)));
    }

    #[test]
    fn beta3_unrolled_fixture() {
        let alphabet = GradedAlphabet::new(vec![("a".into(), 0), ("b".into(), 0), ("c".into(), 0)]).unwrap();
        let abc = TensorElement::basis(Rationals, vec![0, 1, 2]);
        let image = beta(3, &abc, &alphabet, SignMode::Ungraded).unwrap();
        let expected = integer_tensor(
            &[(&[0, 1, 2], 1), (&[1, 0, 2], -1), (&[2, 0, 1], -1), (&[2, 1, 0], 1)],
            3,
        );
        assert_eq!(image, expected);
        assert_eq!(image.terms().count(), 4);
    }

    #[test]
    fn beta_weight_errors() {
        let alphabet = GradedAlphabet::uniform(2, 0);
        let t = TensorElement::basis(Rationals, vec![0]);
        assert!(matches!(beta(1, &t, &alphabet, SignMode::Ungraded), Err(Error::BetaWeight(1))));
        let t = TensorElement::basis(Rationals, vec![0, 1]);
        assert!(matches!(beta(3, &t, &alphabet, SignMode::Ungraded), Err(Error::SizeMismatch { .. })));
        let t = TensorElement::basis(Rationals, vec![0, 5]);
        assert!(beta(2, &t, &alphabet, SignMode::Ungraded).is_err());
    }

    #[test]
    fn beta_matches_bracket_oracle() {
        let alphabet = GradedAlphabet::new(vec![("a".into(), 1), ("b".into(), 2), ("c".into(), 3)]).unwrap();
        for mode in [SignMode::Graded, SignMode::Ungraded] {
            for n in 1..=5 {
                for word in all_words(n, 3) {
                    assert_eq!(
                        beta_word(&word, &alphabet, mode),
                        bracket_oracle(&word, &alphabet, mode),
                        "{word:?} {mode}"
                    );
                }
            }
        }
    }

    #[test]
    fn idempotent_small_cases() {
        for d in 1..=3 {
            let alphabet = GradedAlphabet::uniform(d, 0);
            for n in 2..=4 {
                let verdict = check_idempotent(n, &alphabet, SignMode::Ungraded, &Rationals).unwrap();
                assert!(verdict.holds, "n={n} d={d}");
                assert_eq!(verdict.words_checked, d.pow(n as u32));
            }
        }
        let f5 = PrimeField::new(5).unwrap();
        assert!(check_idempotent(4, &GradedAlphabet::uniform(2, 0), SignMode::Ungraded, &f5).unwrap().holds);
    }

    #[test]
    fn graded_mixed_parity_verdict() {
        let alphabet = GradedAlphabet::new(vec![("x".into(), 1), ("y".into(), 2)]).unwrap();
        for n in 2..=4 {
            let verdict = check_idempotent(n, &alphabet, SignMode::Graded, &Rationals).unwrap();
            assert!(verdict.holds, "n={n}: {:?}", verdict.counterexample);
        }
    }

    #[test]
    fn matrix_squaring_agrees() {
        for n in 2..=4 {
            assert!(idempotent_by_matrix(n, &GradedAlphabet::uniform(2, 0), SignMode::Ungraded, &Rationals).unwrap());
        }
        let f3 = PrimeField::new(3).unwrap();
        assert!(idempotent_by_matrix(4, &GradedAlphabet::uniform(3, 1), SignMode::Graded, &f3).unwrap());
        assert!(matches!(
            idempotent_by_matrix(3, &GradedAlphabet::uniform(2, 0), SignMode::Ungraded, &f3),
            Err(Error::CharacteristicDividesWeight { p: 3, n: 3 })
        ));
    }

    #[test]
    fn lie_rank_examples() {
        let rank = |n, d| lie_rank(n, &GradedAlphabet::uniform(d, 1), &Rationals, SignMode::Ungraded).unwrap().total;
        assert_eq!(rank(2, 2), 1);
        assert_eq!(rank(3, 3), 8);
        assert_eq!(rank(2, 1), 0);
        assert_eq!(rank(1, 3), 3);
        let f2 = PrimeField::new(2).unwrap();
        assert!(matches!(
            lie_rank(4, &GradedAlphabet::uniform(2, 1), &f2, SignMode::Ungraded),
            Err(Error::CharacteristicDividesWeight { p: 2, n: 4 })
        ));
    }

    #[test]
    fn lie_rank_matches_witt() {
        for n in 1..=5 {
            for d in 1..=3 {
                let r = lie_rank(n, &GradedAlphabet::uniform(d, 0), &Rationals, SignMode::Ungraded).unwrap();
                assert_eq!(witt(n as u64, d as u64), r.total.into(), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn lie_rank_matches_dimension_formula() {
        let counts = [0, 1, 1, 1];
        let alphabet = GradedAlphabet::from_degree_counts(&counts);
        for mode in [SignMode::Graded, SignMode::Ungraded] {
            let dims = lie_dimensions(&counts, 5, 15, mode).unwrap();
            for n in 1..=5 {
                let f = PrimeField::new(if n % 7 == 0 { 11 } else { 7 }).unwrap();
                let rank = lie_rank(n, &alphabet, &f, mode).unwrap();
                for (&degree, &r) in &rank.by_degree {
                    assert_eq!(dims[&(n, degree as usize)], r.into(), "n={n} degree={degree} {mode}");
                }
                let formula_total: usize = dims
                    .iter()
                    .filter(|((w, _), _)| *w == n)
                    .map(|(_, v)| usize::try_from(v).unwrap())
                    .sum();
                assert_eq!(formula_total, rank.total, "n={n} {mode}");
            }
        }
    }

    #[test]
    fn rank_degree_cap() {
        let alphabet = GradedAlphabet::from_degree_counts(&[0, 1, 1]);
        let all = lie_rank(3, &alphabet, &Rationals, SignMode::Graded).unwrap();
        let capped = lie_rank_up_to_degree(3, &alphabet, &Rationals, SignMode::Graded, Some(4)).unwrap();
        assert_eq!(
            capped.by_degree,
            all.by_degree.into_iter().filter(|(d, _)| *d <= 4).collect::<BTreeMap<_, _>>()
        );
    }

    #[test]
    fn f2_modes_coincide() {
        let f2 = PrimeField::new(2).unwrap();
        let alphabet = GradedAlphabet::from_degree_counts(&[0, 2, 1]);
        for n in [3, 5] {
            for word in all_words(n, alphabet.len()) {
                let t = TensorElement::basis(f2, word);
                assert_eq!(
                    beta(n, &t, &alphabet, SignMode::Graded).unwrap(),
                    beta(n, &t, &alphabet, SignMode::Ungraded).unwrap()
                );
            }
        }
    }

    proptest! {
        #[test]
        fn beta_is_linear(
            words in proptest::collection::vec((proptest::collection::vec(0u16..3, 4), -3i64..4), 1..6),
            odd in any::<bool>(),
        ) {
            let alphabet = GradedAlphabet::uniform(3, if odd { 1 } else { 2 });
            let mut sum = TensorElement::zero(Rationals, 4);
            let mut images = TensorElement::zero(Rationals, 4);
            for (w, c) in &words {
                sum.add_term(w.clone(), q(*c));
                let image = beta(4, &TensorElement::basis(Rationals, w.clone()), &alphabet, SignMode::Graded).unwrap();
                for (v, k) in image.terms() {
                    images.add_term(v.clone(), k * q(*c));
                }
            }
            prop_assert_eq!(beta(4, &sum, &alphabet, SignMode::Graded).unwrap(), images);
        }

        #[test]
        fn beta_image_is_fixed_up_to_n(word in proptest::collection::vec(0u16..3, 2..6), odd in any::<bool>()) {
            let alphabet = GradedAlphabet::new(vec![
                ("a".into(), 1), ("b".into(), if odd { 3 } else { 2 }), ("c".into(), 2),
            ]).unwrap();
            let n = word.len();
            let b = Beta::new(n, alphabet, SignMode::Graded).unwrap();
            prop_assert!(b.square_defect(&word).is_empty());
        }
    }
}
