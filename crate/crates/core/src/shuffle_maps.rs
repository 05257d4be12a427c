//! Grouped shuffles and the map `L_{k,l}` comparing `H_l ∘ H_k` with `H_{kl}`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coordinate_ring::{CoordinateSeries, RingContext};
use crate::error::{Error, Result};
use crate::group_words::{GeneratorPower, GroupWord};
use crate::james_hopf::hopf_star;

/// A permutation of `1..=kl` cut into `l` increasing blocks of size `k`
/// whose maxima increase, the last maximum being `kl`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupedShuffle {
    blocks: Vec<Vec<usize>>,
}

impl GroupedShuffle {
    /// Validates the block conditions.
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let k = blocks.first().map_or(0, Vec::len);
        let total = k * blocks.len();
        let mut seen = vec![false; total + 1];
        let mut previous_max = 0;
        for block in &blocks {
            if block.len() != k || k == 0 {
                return Err(Error::InvalidPermutation(format!("ragged blocks {blocks:?}")));
            }
            if block.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidPermutation(format!("block {block:?} not increasing")));
            }
            for &v in block {
                if v == 0 || v > total || seen[v] {
                    return Err(Error::InvalidPermutation(format!("{blocks:?} is not a permutation")));
                }
                seen[v] = true;
            }
            let max = *block.last().unwrap();
            if max <= previous_max {
                return Err(Error::InvalidPermutation(format!("block maxima of {blocks:?} not increasing")));
            }
            previous_max = max;
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// The block maxima `j_1 < ... < j_l`.
    pub fn markers(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| *b.last().unwrap()).collect()
    }

    pub fn flattened(&self) -> Vec<usize> {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn inversions(&self) -> usize {
        let flat = self.flattened();
        let mut count = 0;
        for i in 0..flat.len() {
            for j in i + 1..flat.len() {
                if flat[i] > flat[j] {
                    count += 1;
                }
            }
        }
        count
    }
}

impl fmt::Display for GroupedShuffle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.flattened().iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All grouped shuffles for `(k, l)`, in ascending lexicographic order of the
/// flattened permutation.
pub fn grouped_shuffles(k: usize, l: usize) -> Vec<GroupedShuffle> {
    if k == 0 || l == 0 {
        return Vec::new();
    }
    let total = k * l;
    let mut out = Vec::new();
    let mut used = vec![false; total + 1];
    let mut blocks = Vec::with_capacity(l);
    partitions(k, total, &mut used, &mut blocks, &mut out);
    out.sort();
    out
}

/// Set partitions into size-`k` blocks: the smallest free element opens the next block.
fn partitions(
    k: usize,
    total: usize,
    used: &mut [bool],
    blocks: &mut Vec<Vec<usize>>,
    out: &mut Vec<GroupedShuffle>,
) {
    let Some(first) = (1..=total).find(|&v| !used[v]) else {
        let mut sorted = blocks.clone();
        sorted.sort_by_key(|b: &Vec<usize>| *b.last().unwrap());
        out.push(GroupedShuffle { blocks: sorted });
        return;
    };
    used[first] = true;
    let free: Vec<usize> = (first + 1..=total).filter(|&v| !used[v]).collect();
    for rest in crate::james_hopf::colex_subsets(free.len(), k - 1) {
        let mut block = vec![first];
        block.extend(rest.iter().map(|&i| free[i]));
        for &v in &block[1..] {
            used[v] = true;
        }
        blocks.push(block);
        partitions(k, total, used, blocks, out);
        let block = blocks.pop().unwrap();
        for &v in &block[1..] {
            used[v] = false;
        }
    }
    used[first] = false;
}

/// Order in which the shuffle product of `L_{k,l}` is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "order", content = "seed")]
pub enum ShuffleOrder {
    #[default]
    Canonical,
    Reversed,
    Shuffled(u64),
}

impl ShuffleOrder {
    pub fn arrange(self, mut shuffles: Vec<GroupedShuffle>) -> Vec<GroupedShuffle> {
        match self {
            ShuffleOrder::Canonical => {}
            ShuffleOrder::Reversed => shuffles.reverse(),
            ShuffleOrder::Shuffled(seed) => shuffles.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
        }
        shuffles
    }
}

impl fmt::Display for ShuffleOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShuffleOrder::Canonical => f.write_str("canonical"),
            ShuffleOrder::Reversed => f.write_str("reversed"),
            ShuffleOrder::Shuffled(seed) => write!(f, "shuffled({seed})"),
        }
    }
}

/// `(L̃_{k,l})_*` with the canonical shuffle order.
pub fn l_star(k: usize, l: usize, word: &GroupWord) -> Result<GroupWord> {
    l_star_ordered(k, l, word, ShuffleOrder::Canonical)
}

/// `(L̃_{k,l})_*`: each `g_A^{±1}` becomes `(prod_σ g_{σ·A})^{±1}`, where
/// `(σ·A)_i = A_{σ(i)}`.
pub fn l_star_ordered(
    k: usize,
    l: usize,
    word: &GroupWord,
    order: ShuffleOrder,
) -> Result<GroupWord> {
    if word.arity() != k * l {
        return Err(Error::ArityMismatch {
            expected: k * l,
            found: word.arity(),
        });
    }
    let shuffles = order.arrange(grouped_shuffles(k, l));
    let positions: Vec<Vec<usize>> = shuffles
        .iter()
        .map(|s| s.flattened().iter().map(|v| v - 1).collect())
        .collect();
    let mut out = Vec::new();
    for factor in word.factors() {
        let sign: i64 = if factor.exponent == 1.into() {
            1
        } else if factor.exponent == (-1).into() {
            -1
        } else {
            return Err(Error::ExponentNotUnit(factor.exponent.to_string()));
        };
        let images = positions
            .iter()
            .map(|p| Ok(GeneratorPower::new(factor.letter.permuted(p)?, sign)))
            .collect::<Result<Vec<_>>>()?;
        if sign == 1 {
            out.extend(images);
        } else {
            out.extend(images.into_iter().rev());
        }
    }
    GroupWord::from_factors(word.context(), out)
}

/// Mapping degree of `L_{k,l}` on a smash of spheres all of dimension
/// `letter_degree`: the Koszul-signed count of grouped shuffles.
pub fn koszul_degree(k: usize, l: usize, letter_degree: u32) -> i64 {
    grouped_shuffles(k, l)
        .iter()
        .map(|s| {
            if letter_degree % 2 == 1 && s.inversions() % 2 == 1 {
                -1
            } else {
                1
            }
        })
        .sum()
}

/// Outcome of comparing `H_l ∘ H_k` with `L̃_{k,l} ∘ H_{kl}` on `x_1 ... x_n`.
#[derive(Debug, Clone)]
pub struct CompositionCheck {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub composite: CoordinateSeries,
    pub shuffled: CoordinateSeries,
}

impl CompositionCheck {
    pub fn holds(&self) -> bool {
        self.composite == self.shuffled
    }

    /// `shuffled - composite`; zero exactly when the check holds.
    pub fn difference(&self) -> CoordinateSeries {
        self.shuffled
            .sub(&self.composite)
            .expect("both sides live in R_{n,kl}")
    }
}

pub fn verify_prop314(n: usize, k: usize, l: usize) -> Result<CompositionCheck> {
    verify_prop314_ordered(n, k, l, ShuffleOrder::Canonical)
}

pub fn verify_prop314_ordered(
    n: usize,
    k: usize,
    l: usize,
    order: ShuffleOrder,
) -> Result<CompositionCheck> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidHopfDegree(0));
    }
    RingContext::new(n, k * l)?;
    let word = GroupWord::standard(n)?;
    let composite = hopf_star(l, &hopf_star(k, &word)?)?.rho();
    let shuffled = l_star_ordered(k, l, &hopf_star(k * l, &word)?, order)?.rho();
    Ok(CompositionCheck {
        n,
        k,
        l,
        composite,
        shuffled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coordinate_ring::TupleLetter;

    /// Every permutation of `1..=m`, in lexicographic order.
    fn all_permutations(m: usize) -> Vec<Vec<usize>> {
        if m == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in all_permutations(m - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, m);
                out.push(q);
            }
        }
        out.sort();
        out
    }

    fn brute_force(k: usize, l: usize) -> Vec<Vec<usize>> {
        all_permutations(k * l)
            .into_iter()
            .filter(|p| {
                let blocks: Vec<Vec<usize>> = p.chunks(k).map(<[usize]>::to_vec).collect();
                GroupedShuffle::new(blocks).is_ok() && p.last() == Some(&(k * l))
            })
            .collect()
    }

    #[test]
    fn two_two_shuffles() {
        let flat: Vec<Vec<usize>> = grouped_shuffles(2, 2).iter().map(|s| s.flattened()).collect();
        assert_eq!(flat, vec![vec![1, 2, 3, 4], vec![1, 3, 2, 4], vec![2, 3, 1, 4]]);
        assert_eq!(grouped_shuffles(2, 2)[2].markers(), vec![3, 4]);
    }

    #[test]
    fn degenerate_shuffles_are_identity() {
        for l in 1..=5 {
            let s = grouped_shuffles(1, l);
            assert_eq!(s.len(), 1);
            assert_eq!(s[0].flattened(), (1..=l).collect::<Vec<_>>());
        }
        for k in 1..=5 {
            let s = grouped_shuffles(k, 1);
            assert_eq!(s.len(), 1);
            assert_eq!(s[0].flattened(), (1..=k).collect::<Vec<_>>());
        }
    }

    #[test]
    fn shuffles_match_brute_force() {
        for (k, l) in [(2, 2), (2, 3), (3, 2), (2, 4), (4, 2), (1, 4), (3, 1)] {
            let fast: Vec<Vec<usize>> = grouped_shuffles(k, l).iter().map(|s| s.flattened()).collect();
            assert_eq!(fast, brute_force(k, l), "k={k} l={l}");
        }
    }

    #[test]
    fn shuffle_validation() {
        assert!(GroupedShuffle::new(vec![vec![2, 1], vec![3, 4]]).is_err());
        assert!(GroupedShuffle::new(vec![vec![1, 4], vec![2, 3]]).is_err());
        assert!(GroupedShuffle::new(vec![vec![1, 2], vec![2, 4]]).is_err());
        assert!(GroupedShuffle::new(vec![vec![1, 3], vec![2, 4]]).is_ok());
    }

    #[test]
    fn koszul_degree_values() {
        for n in 1..=6 {
            let expected = if n % 2 == 0 { 3 } else { 1 };
            assert_eq!(koszul_degree(2, 2, n), expected, "n={n}");
        }
        for l in 1..=4 {
            assert_eq!(koszul_degree(1, l, 3), 1);
        }
    }

    #[test]
    fn l_star_examples() {
        let ctx = RingContext::new(4, 4).unwrap();
        let w = GroupWord::generator(ctx, TupleLetter::new([1, 2, 3, 4]).unwrap(), 1).unwrap();
        let image = l_star_ordered(2, 2, &w, ShuffleOrder::Reversed).unwrap();
        assert_eq!(image.to_string(), "{2,3,1,4} {1,3,2,4} {1,2,3,4}");
        let inverse = l_star(2, 2, &w.inverse()).unwrap();
        assert_eq!(inverse, l_star(2, 2, &w).unwrap().inverse());

        let one = RingContext::new(3, 1).unwrap();
        let w = GroupWord::coordinates(3, &[(2, 1), (1, -1)]).unwrap();
        assert_eq!(l_star(1, 1, &w).unwrap(), w);
        assert!(l_star(2, 2, &GroupWord::identity(ctx)).unwrap().is_empty());
        assert!(l_star(2, 2, &GroupWord::identity(one)).is_err());
    }

    #[test]
    fn l_star_rejects_higher_exponents() {
        let ctx = RingContext::new(4, 4).unwrap();
        let w = GroupWord::generator(ctx, TupleLetter::new([1, 2, 3, 4]).unwrap(), 2).unwrap();
        assert!(matches!(l_star(2, 2, &w), Err(Error::ExponentNotUnit(_))));
    }

    #[test]
    fn composition_small_cases() {
        let check = verify_prop314(4, 2, 2).unwrap();
        assert!(check.holds());
        assert!(!check.composite.is_one());
        assert!(check.difference().is_zero());
        let check = verify_prop314(3, 2, 2).unwrap();
        assert!(check.composite.is_one() && check.shuffled.is_one());
    }

    #[test]
    fn composition_independent_of_shuffle_order() {
        for order in [ShuffleOrder::Reversed, ShuffleOrder::Shuffled(3), ShuffleOrder::Shuffled(11)] {
            let a = verify_prop314_ordered(6, 2, 3, order).unwrap();
            assert!(a.holds(), "{order}");
            assert_eq!(a.shuffled, verify_prop314(6, 2, 3).unwrap().shuffled);
        }
    }
}
