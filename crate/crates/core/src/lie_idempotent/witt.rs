//! Dimension counts for free Lie algebras.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Pow, Zero};

use super::tensor::SignMode;
use crate::error::{Error, Result};

pub fn mobius(n: u64) -> i64 {
    assert!(n > 0, "mobius is defined on positive integers");
    let mut n = n;
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// `(1/n) sum_{e | n} mu(e) d^{n/e}`: the weight-`n` dimension of the free
/// Lie algebra on `d` generators.
pub fn witt(n: u64, d: u64) -> BigInt {
    assert!(n >= 1, "weight must be positive");
    let mut total = BigInt::zero();
    for e in 1..=n {
        if n % e == 0 {
            let term: BigInt = Pow::pow(BigInt::from(d), n / e);
            total += term * mobius(e);
        }
    }
    let (q, r) = total.div_rem(&BigInt::from(n));
    debug_assert!(r.is_zero());
    q
}

/// Dimensions of the free Lie algebra on a graded alphabet, by weight and
/// internal degree, up to the given bounds.
///
/// `degree_counts[d]` is the number of letters of degree `d` (degree 0 is not
/// allowed). In graded mode letters of odd degree are odd, and the counts are
/// those of the free Lie superalgebra; in ungraded mode this is the
/// multigraded Witt formula. With `B(N, D)` the number of weight-`N` words of
/// degree `D`, the dimensions satisfy
/// `B(N, D) = sum_{m | (N, D)} (N/m) ε(D/m)^{m+1} L(N/m, D/m)`, `ε(d) = (-1)^d`,
/// which is solved here for `L(N, D)` by increasing `N`.
pub fn lie_dimensions(
    degree_counts: &[usize],
    max_weight: usize,
    max_degree: usize,
    mode: SignMode,
) -> Result<BTreeMap<(usize, usize), BigInt>> {
    if degree_counts.first().is_some_and(|&c| c > 0) {
        return Err(Error::NonzeroConstantTerm);
    }
    // powers[N][D] = [t^D] v(t)^N
    let mut powers: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); max_degree + 1]];
    powers[0][0] = BigInt::from(1);
    for w in 1..=max_weight {
        let mut next = vec![BigInt::zero(); max_degree + 1];
        for (d1, c1) in powers[w - 1].iter().enumerate() {
            if c1.is_zero() {
                continue;
            }
            for (d2, &c2) in degree_counts.iter().enumerate() {
                if c2 > 0 && d1 + d2 <= max_degree {
                    next[d1 + d2] += c1 * c2;
                }
            }
        }
        powers.push(next);
    }
    let parity = |d: usize| -> i64 {
        match mode {
            SignMode::Graded if d % 2 == 1 => -1,
            _ => 1,
        }
    };
    let mut dims = BTreeMap::new();
    for w in 1..=max_weight {
        for d in 0..=max_degree {
            let mut value = powers[w][d].clone();
            if value.is_zero() {
                continue;
            }
            for m in 2..=w {
                if w % m != 0 || d % m != 0 {
                    continue;
                }
                if let Some(lower) = dims.get(&(w / m, d / m)) {
                    let sign = if m % 2 == 0 { parity(d / m) } else { 1 };
                    value -= BigInt::from((w / m) as i64 * sign) * lower;
                }
            }
            let (q, r) = value.div_rem(&BigInt::from(w));
            if !r.is_zero() {
                return Err(Error::Config(format!(
                    "non-integral Lie dimension at weight {w}, degree {d}"
                )));
            }
            if !q.is_zero() {
                dims.insert((w, d), q);
            }
        }
    }
    Ok(dims)
}
