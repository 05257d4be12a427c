//! The combinatorial James-Hopf calculus on words.
//!
//! `(H_k)_*` sends `A_1^{n_1} ... A_l^{n_l}` to the product over increasing
//! position tuples `j_1 < ... < j_k` of `g_{A_{j_1}...A_{j_k}}^{n_{j_1}...n_{j_k}}`.
//! Tuples are taken in colexicographic order: sorted by `j_k`, then `j_{k-1}`,
//! and so on. That is the order in which the product splits along the last
//! factor, `(H_k)_*(b x) = (H_k)_*(b) * w(x)`, and the expansion of
//! [`hopf_expand_product`] relies on it.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coordinate_ring::{RingContext, TupleLetter};
use crate::error::{Error, Result};
use crate::group_words::{commutator, GeneratorPower, GroupWord};

/// All `k`-subsets of `0..l` as increasing vectors, in colexicographic order.
pub(crate) fn colex_subsets(l: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for last in (k - 1)..l {
        for mut prefix in colex_subsets(last, k - 1) {
            prefix.push(last);
            out.push(prefix);
        }
    }
    out
}

/// `(H_k)_*` on a word over arity-`a` letters; the result has arity `a * k`.
///
/// Tuples of letters are concatenated in block order. A word with fewer than
/// `k` factors maps to the identity.
pub fn hopf_star(k: usize, word: &GroupWord) -> Result<GroupWord> {
    if k == 0 {
        return Err(Error::InvalidHopfDegree(k));
    }
    let source = word.context();
    let context = RingContext::new(source.n, source.arity * k)?;
    let factors = word.factors();
    let out = colex_subsets(factors.len(), k)
        .into_iter()
        .map(|positions| combine(positions.iter().map(|&j| &factors[j])))
        .filter(|g| !g.exponent.is_zero())
        .collect();
    Ok(GroupWord::from_validated(context, out))
}

/// `{A_1^{[m_1]}|...|A_s^{[m_s]}}` as a single generator power.
fn combine<'a>(parts: impl Iterator<Item = &'a GeneratorPower>) -> GeneratorPower {
    let mut indices: Vec<usize> = Vec::new();
    let mut exponent = BigInt::one();
    for part in parts {
        indices.extend(part.letter.indices());
        exponent *= &part.exponent;
    }
    GeneratorPower::new(
        TupleLetter::new(indices).expect("indices come from validated letters"),
        exponent,
    )
}

/// A word of letters without exponents: a point `x_1 x_2 ... x_m` of `J(X)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LetterWord {
    context: RingContext,
    letters: Vec<TupleLetter>,
}

impl LetterWord {
    pub fn new(context: RingContext, letters: Vec<TupleLetter>) -> Result<Self> {
        for letter in &letters {
            context.check_letter(letter)?;
        }
        Ok(Self { context, letters })
    }

    /// `x_{i_1} x_{i_2} ...` over single coordinates.
    pub fn coordinates(n: usize, indices: &[usize]) -> Result<Self> {
        let letters = indices
            .iter()
            .map(|&i| TupleLetter::single(i))
            .collect::<Result<Vec<_>>>()?;
        Self::new(RingContext::new(n, 1)?, letters)
    }

    pub fn letters(&self) -> &[TupleLetter] {
        &self.letters
    }

    pub fn context(&self) -> RingContext {
        self.context
    }

    /// The same word with every exponent 1.
    pub fn to_group_word(&self) -> GroupWord {
        let factors = self
            .letters
            .iter()
            .map(|l| GeneratorPower::new(l.clone(), 1))
            .collect();
        GroupWord::from_validated(self.context, factors)
    }
}

/// The James-Hopf map on a reduced point: all `k`-letter subwords in colex order.
///
/// Enumerates subwords as bit masks in increasing numeric order, which is the
/// colexicographic order on position sets.
pub fn james_hopf_pointwise(k: usize, word: &LetterWord) -> Result<LetterWord> {
    if k == 0 {
        return Err(Error::InvalidHopfDegree(k));
    }
    if word.context.arity != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            found: word.context.arity,
        });
    }
    for (pos, letter) in word.letters.iter().enumerate() {
        if word.letters[..pos].contains(letter) {
            return Err(Error::RepeatedLetter(letter.indices().next().unwrap_or(0)));
        }
    }
    let len = word.letters.len();
    if len >= 64 {
        return Err(Error::Config(format!("pointwise oracle limited to 63 letters, got {len}")));
    }
    let context = RingContext::new(word.context.n, k)?;
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << len) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let indices = (0..len)
            .filter(|bit| mask & (1 << bit) != 0)
            .flat_map(|bit| word.letters[bit].indices());
        out.push(TupleLetter::new(indices)?);
    }
    Ok(LetterWord {
        context,
        letters: out,
    })
}

/// `w ⊗ g`: every factor `A^m` becomes `(A B)^{m * e}` for `g = B^e`, order kept.
pub fn tensor_generator(word: &GroupWord, generator: &GeneratorPower) -> Result<GroupWord> {
    let source = word.context();
    generator.letter.check_range(source.n)?;
    let context = RingContext::new(source.n, source.arity + generator.letter.arity())?;
    let factors = word
        .factors()
        .iter()
        .map(|f| {
            GeneratorPower::new(
                f.letter.concat(&generator.letter),
                &f.exponent * &generator.exponent,
            )
        })
        .filter(|g| !g.exponent.is_zero())
        .collect();
    Ok(GroupWord::from_validated(context, factors))
}

/// Order of the inner products in [`hopf_expand_product`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "policy", content = "seed")]
pub enum OrderPolicy {
    Lex,
    ReverseLex,
    Random(u64),
}

impl OrderPolicy {
    pub fn all(seed: u64) -> [OrderPolicy; 3] {
        [OrderPolicy::Lex, OrderPolicy::ReverseLex, OrderPolicy::Random(seed)]
    }
}

impl fmt::Display for OrderPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderPolicy::Lex => f.write_str("lex"),
            OrderPolicy::ReverseLex => f.write_str("reverse-lex"),
            OrderPolicy::Random(seed) => write!(f, "random({seed})"),
        }
    }
}

impl std::str::FromStr for OrderPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lex" => Ok(OrderPolicy::Lex),
            "reverse-lex" => Ok(OrderPolicy::ReverseLex),
            _ => {
                let seed = s
                    .strip_prefix("random")
                    .map(|rest| rest.trim_start_matches(['(', ':', '=']).trim_end_matches(')'))
                    .ok_or_else(|| Error::Config(format!("unknown order policy '{s}'")))?;
                if seed.is_empty() {
                    return Ok(OrderPolicy::Random(crate::group_words::DEFAULT_SEED));
                }
                seed.parse()
                    .map(OrderPolicy::Random)
                    .map_err(|_| Error::Config(format!("bad seed in order policy '{s}'")))
            }
        }
    }
}

/// Right-hand side of the product expansion of `(H_k)_*(a y)`:
///
/// `(H_k)_*(a) * prod_j prod_{l_1 < ... < l_s = j, 1 <= s <= k} (H_{k-s})_*(a) ⊗ {y_{l_1}|...|y_{l_s}}`
///
/// where `y = y_1 ... y_q` is read factor by factor, `(H_0)_*(a) ⊗ g = g`,
/// and `policy` orders the inner product for each `j`.
pub fn hopf_expand_product(
    k: usize,
    a: &GroupWord,
    y: &GroupWord,
    policy: OrderPolicy,
) -> Result<GroupWord> {
    if k == 0 {
        return Err(Error::InvalidHopfDegree(k));
    }
    for w in [a, y] {
        if w.arity() != 1 {
            return Err(Error::ArityMismatch {
                expected: 1,
                found: w.arity(),
            });
        }
    }
    if a.context() != y.context() {
        return Err(Error::ContextMismatch {
            left: a.context(),
            right: y.context(),
        });
    }
    let lower: Vec<GroupWord> = (1..k).map(|d| hopf_star(d, a)).collect::<Result<_>>()?;
    let mut out = hopf_star(k, a)?;
    let ys = y.factors();
    for j in 0..ys.len() {
        let mut tuples: Vec<Vec<usize>> = Vec::new();
        for s in 1..=k.min(j + 1) {
            for mut prefix in colex_subsets(j, s - 1) {
                prefix.push(j);
                tuples.push(prefix);
            }
        }
        match policy {
            OrderPolicy::Lex => tuples.sort(),
            OrderPolicy::ReverseLex => {
                tuples.sort();
                tuples.reverse();
            }
            OrderPolicy::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (j as u64).wrapping_mul(0x9e37_79b9));
                tuples.shuffle(&mut rng);
            }
        }
        for tuple in tuples {
            let g = combine(tuple.iter().map(|&l| &ys[l]));
            let s = tuple.len();
            let term = if s == k {
                GroupWord::from_factors(out.context(), [g])?
            } else {
                tensor_generator(&lower[k - s - 1], &g)?
            };
            out = out.concat(&term)?;
        }
    }
    Ok(out)
}

/// Both sides of a displayed equation, compared under `rho`.
#[derive(Debug, Clone)]
pub struct Witness {
    pub name: &'static str,
    pub lhs: GroupWord,
    pub rhs: GroupWord,
}

impl Witness {
    pub fn sides_agree(&self) -> bool {
        self.lhs.rho() == self.rhs.rho()
    }

    pub fn is_nontrivial(&self) -> bool {
        !self.lhs.rho().is_one()
    }
}

/// The two witnesses that the vanishing of `(H_k)_*([[z_1..z_m]]) ⊗ x_j`
/// needs `m > k`:
/// `(H_1)_*(x_1) ⊗ x_2 = {x_1|x_2}` and
/// `(H_2)_*([x_1,x_2]) ⊗ x_3 = {x_1|x_2|x_3} {x_2|x_1|x_3}^-1`.
pub fn remark36_witnesses() -> Result<Vec<Witness>> {
    let x = |n: usize, i: usize| GroupWord::coordinates(n, &[(i, 1)]);
    let g = |ix: &[usize], m: i64| GeneratorPower::new(TupleLetter::new(ix.to_vec()).unwrap(), m);

    let first_lhs = tensor_generator(&hopf_star(1, &x(2, 1)?)?, &g(&[2], 1))?;
    let first_rhs = GroupWord::from_factors(RingContext::new(2, 2)?, [g(&[1, 2], 1)])?;

    let c12 = commutator(&[x(3, 1)?, x(3, 2)?])?;
    let second_lhs = tensor_generator(&hopf_star(2, &c12)?, &g(&[3], 1))?;
    let second_rhs = GroupWord::from_factors(
        RingContext::new(3, 3)?,
        [g(&[1, 2, 3], 1), g(&[2, 1, 3], -1)],
    )?;

    Ok(vec![
        Witness {
            name: "H1(x1) (x) x2 = {x1|x2}",
            lhs: first_lhs,
            rhs: first_rhs,
        },
        Witness {
            name: "H2([x1,x2]) (x) x3 = {x1|x2|x3}{x2|x1|x3}^-1",
            lhs: second_lhs,
            rhs: second_rhs,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coordinate_ring::CoordinateSeries;

    fn xs(n: usize, f: &[(usize, i64)]) -> GroupWord {
        GroupWord::coordinates(n, f).unwrap()
    }

    fn gp(ix: &[usize], m: i64) -> GeneratorPower {
        GeneratorPower::new(TupleLetter::new(ix.to_vec()).unwrap(), m)
    }

    #[test]
    fn colex_order_groups_by_last_position() {
        assert_eq!(
            colex_subsets(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 3],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(colex_subsets(2, 3), Vec::<Vec<usize>>::new());
    }

    #[test]
    fn hopf_star_examples() {
        let w = xs(3, &[(1, 1), (2, 1), (3, 1)]);
        assert_eq!(hopf_star(2, &w).unwrap().to_string(), "{1,2} {1,3} {2,3}");
        let w = xs(2, &[(1, 2), (2, 3)]);
        assert_eq!(hopf_star(2, &w).unwrap().to_string(), "{1,2}^6");
        let w = xs(2, &[(1, 1), (2, 1)]);
        assert!(hopf_star(3, &w).unwrap().is_empty());
        assert!(matches!(hopf_star(0, &w), Err(Error::InvalidHopfDegree(0))));
    }

    #[test]
    fn pointwise_examples() {
        let w = LetterWord::coordinates(3, &[1, 2, 3]).unwrap();
        let h = james_hopf_pointwise(2, &w).unwrap();
        let rendered: Vec<String> = h.letters().iter().map(|l| l.to_string()).collect();
        assert_eq!(rendered, ["(1,2)", "(1,3)", "(2,3)"]);
        let w = LetterWord::coordinates(5, &[4, 1, 3]).unwrap();
        assert_eq!(james_hopf_pointwise(1, &w).unwrap().letters(), w.letters());
        let w = LetterWord::coordinates(5, &[2, 5]).unwrap();
        let rendered: Vec<String> = james_hopf_pointwise(2, &w)
            .unwrap()
            .letters()
            .iter()
            .map(|l| l.to_string())
            .collect();
        assert_eq!(rendered, ["(2,5)"]);
    }

    #[test]
    fn pointwise_rejects_repeats() {
        let w = LetterWord::coordinates(3, &[1, 2, 1]).unwrap();
        assert!(matches!(james_hopf_pointwise(2, &w), Err(Error::RepeatedLetter(1))));
    }

    #[test]
    fn tensor_generator_examples() {
        let w = xs(3, &[(1, 1), (2, 1)]);
        assert_eq!(
            tensor_generator(&w, &gp(&[3], 1)).unwrap().to_string(),
            "{1,3} {2,3}"
        );
        let w = xs(3, &[(3, 2), (3, -1)]);
        assert!(tensor_generator(&w, &gp(&[3], 1)).unwrap().rho().is_one());
        let id = GroupWord::identity(RingContext::new(3, 1).unwrap());
        assert!(tensor_generator(&id, &gp(&[3], 5)).unwrap().is_empty());
        assert_eq!(
            tensor_generator(&xs(3, &[(1, -2)]), &gp(&[2], 3)).unwrap().to_string(),
            "{1,2}^-6"
        );
    }

    #[test]
    fn expansion_with_trivial_prefix() {
        let a = GroupWord::identity(RingContext::new(2, 1).unwrap());
        let y = xs(2, &[(1, 1), (2, 1)]);
        let rhs = hopf_expand_product(2, &a, &y, OrderPolicy::Lex).unwrap();
        assert_eq!(rhs.rho().to_string(), "1 + e(1,2)");
    }

    #[test]
    fn expansion_with_first_hopf_map() {
        let a = xs(2, &[(1, 1)]);
        let y = xs(2, &[(2, 1)]);
        let rhs = hopf_expand_product(1, &a, &y, OrderPolicy::Lex).unwrap();
        assert_eq!(rhs.rho(), hopf_star(1, &xs(2, &[(1, 1), (2, 1)])).unwrap().rho());
        assert_eq!(rhs.rho().to_string(), "1 + e(1) + e(1)e(2) + e(2)");
    }

    #[test]
    fn expansion_after_commutator() {
        let a = commutator(&[xs(3, &[(1, 1)]), xs(3, &[(2, 1)])]).unwrap();
        let y = xs(3, &[(3, 1)]);
        let lhs = hopf_star(2, &a.concat(&y).unwrap()).unwrap().rho();
        for policy in OrderPolicy::all(7) {
            let rhs = hopf_expand_product(2, &a, &y, policy).unwrap().rho();
            assert_eq!(lhs, rhs, "{policy}");
        }
    }

    #[test]
    fn remark36_values() {
        let witnesses = remark36_witnesses().unwrap();
        assert_eq!(witnesses[0].lhs.rho().to_string(), "1 + e(1,2)");
        assert_eq!(witnesses[1].lhs.rho().to_string(), "1 + e(1,2,3) - e(2,1,3)");
        for w in &witnesses {
            assert!(w.sides_agree(), "{}", w.name);
            assert!(w.is_nontrivial(), "{}", w.name);
        }
    }

    #[test]
    fn order_policy_parsing() {
        assert_eq!("lex".parse::<OrderPolicy>().unwrap(), OrderPolicy::Lex);
        assert_eq!("reverse-lex".parse::<OrderPolicy>().unwrap(), OrderPolicy::ReverseLex);
        assert_eq!("random(9)".parse::<OrderPolicy>().unwrap(), OrderPolicy::Random(9));
        assert_eq!("random:9".parse::<OrderPolicy>().unwrap(), OrderPolicy::Random(9));
        assert!("sideways".parse::<OrderPolicy>().is_err());
    }

    #[test]
    fn abelianized_tensor() {
        let a = xs(4, &[(1, 2), (2, -1)]);
        let b = xs(4, &[(3, 1), (1, 3)]);
        let g = gp(&[4], 2);
        let ab = tensor_generator(&a.concat(&b).unwrap(), &g).unwrap().rho();
        let ba = tensor_generator(&b.concat(&a).unwrap(), &g).unwrap().rho();
        assert_eq!(ab, ba);
        assert_ne!(ab, CoordinateSeries::one(RingContext::new(4, 2).unwrap()));
    }
}
