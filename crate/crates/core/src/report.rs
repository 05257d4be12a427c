//! The verification grid and its reports.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::coordinate_ring::{CoordinateSeries, RingContext, TupleLetter};
use crate::error::{Error, Result};
use crate::group_words::{
    commutator, gamma_test_elements, random_coordinate_word, ExponentSampling, GeneratorPower,
    GroupWord, DEFAULT_EXPONENTS, DEFAULT_SEED,
};
use crate::james_hopf::{
    hopf_expand_product, hopf_star, james_hopf_pointwise, remark36_witnesses, tensor_generator,
    LetterWord, OrderPolicy,
};
use crate::lie_idempotent::{
    check_idempotent, lie_rank, witt, Field, GradedAlphabet, PrimeField, Rationals, SignMode,
};
use crate::series_decomp::{
    cor41, cor42, james_series, validate_ks, LnMethod, PowerSeries, SeriesInstance,
    DEFAULT_TRUNCATION,
};
use crate::shuffle_maps::{grouped_shuffles, koszul_degree, verify_prop314_ordered, ShuffleOrder};

/// Hard cap on the number of coordinates.
pub const MAX_N: usize = 10;

/// Index sequences are enumerated exhaustively up to this many, sampled beyond.
const EXHAUSTIVE_LIMIT: usize = 4096;
const SAMPLED_SEQUENCES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    Lemma22,
    Lemma23Oracle,
    Lemma33,
    Lemma34,
    Lemma35,
    Remark36,
    Theorem38,
    Prop314,
    Example316,
    BetaIdempotent,
    WittAgreement,
    Decomposition,
}

impl CheckName {
    pub const ALL: [CheckName; 12] = [
        CheckName::Lemma22,
        CheckName::Lemma23Oracle,
        CheckName::Lemma33,
        CheckName::Lemma34,
        CheckName::Lemma35,
        CheckName::Remark36,
        CheckName::Theorem38,
        CheckName::Prop314,
        CheckName::Example316,
        CheckName::BetaIdempotent,
        CheckName::WittAgreement,
        CheckName::Decomposition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckName::Lemma22 => "lemma22",
            CheckName::Lemma23Oracle => "lemma23-oracle",
            CheckName::Lemma33 => "lemma33",
            CheckName::Lemma34 => "lemma34",
            CheckName::Lemma35 => "lemma35",
            CheckName::Remark36 => "remark36",
            CheckName::Theorem38 => "theorem38",
            CheckName::Prop314 => "prop314",
            CheckName::Example316 => "example316",
            CheckName::BetaIdempotent => "beta-idempotent",
            CheckName::WittAgreement => "witt-agreement",
            CheckName::Decomposition => "decomposition",
        }
    }

    /// Where the identity being checked is stated.
    pub fn anchor(self) -> &'static str {
        match self {
            CheckName::Lemma22 => "Lemma 2.2 (1)-(4)",
            CheckName::Lemma23Oracle => "Lemma 2.3 / H_k on x_1...x_n",
            CheckName::Lemma33 => "Lemma 3.3",
            CheckName::Lemma34 => "Lemma 3.4",
            CheckName::Lemma35 => "Lemma 3.5",
            CheckName::Remark36 => "Remark 3.6",
            CheckName::Theorem38 => "Theorem 3.8",
            CheckName::Prop314 => "Proposition 3.14 / Remark 3.15",
            CheckName::Example316 => "Example 3.16",
            CheckName::BetaIdempotent => "Notation 1.5 / beta_n o beta_n = n beta_n",
            CheckName::WittAgreement => "Lie elements of weight n",
            CheckName::Decomposition => "Theorem 1.6 / Corollary 4.1 / Corollary 4.2",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = CheckName::ALL.iter().map(|c| c.name()).collect();
                Error::Config(format!("unknown check '{s}' (known: {})", known.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    /// Largest `n` for the sampled identity grids.
    pub max_n: usize,
    /// Largest `n` for the oracle and composition checks.
    pub oracle_max_n: usize,
    pub max_k: usize,
    pub max_l: usize,
    pub seed: u64,
    pub exponents: Vec<i64>,
    /// Random decorated-commutator draws per `(n, k)` point.
    pub lemma22_draws: usize,
    /// Sampled inputs per grid point for the Hopf expansion checks.
    pub samples: usize,
    pub order_policies: Vec<OrderPolicy>,
    pub shuffle_order: ShuffleOrder,
    /// Also compare every shuffle order against the canonical one.
    pub order_independence: bool,
    pub beta_max_n: usize,
    pub beta_max_d: usize,
    pub primes: Vec<u64>,
    pub witt_max_n: usize,
    pub witt_max_d: usize,
    pub max_degree: usize,
    /// `n` of the Moore space `P^n(2)`.
    pub moore_n: usize,
    pub sign_mode: SignMode,
    pub checks: Vec<CheckName>,
    /// Record wall-clock durations (makes the output nondeterministic).
    pub timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            max_n: 6,
            oracle_max_n: 8,
            max_k: 3,
            max_l: 3,
            seed: DEFAULT_SEED,
            exponents: DEFAULT_EXPONENTS.to_vec(),
            lemma22_draws: 700,
            samples: 100,
            order_policies: OrderPolicy::all(DEFAULT_SEED).to_vec(),
            shuffle_order: ShuffleOrder::Canonical,
            order_independence: true,
            beta_max_n: 6,
            beta_max_d: 3,
            primes: vec![2, 3, 5],
            witt_max_n: 5,
            witt_max_d: 3,
            max_degree: DEFAULT_TRUNCATION,
            moore_n: 4,
            sign_mode: SignMode::Graded,
            checks: CheckName::ALL.to_vec(),
            timings: false,
        }
    }
}

impl SuiteConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.order_policies = self
            .order_policies
            .into_iter()
            .map(|p| match p {
                OrderPolicy::Random(_) => OrderPolicy::Random(seed),
                other => other,
            })
            .collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        let too_big = [
            ("max_n", self.max_n),
            ("oracle_max_n", self.oracle_max_n),
            ("beta_max_n", self.beta_max_n),
            ("witt_max_n", self.witt_max_n),
        ];
        for (name, value) in too_big {
            if value > MAX_N {
                return Err(Error::Config(format!("{name} = {value} exceeds the cap {MAX_N}")));
            }
        }
        if self.max_k == 0 || self.max_l == 0 {
            return Err(Error::Config("k and l must be at least 1".into()));
        }
        if self.exponents.is_empty() {
            return Err(Error::Config("exponent set is empty".into()));
        }
        if self.order_policies.is_empty() {
            return Err(Error::Config("no order policy selected".into()));
        }
        if self.max_degree == 0 || self.max_degree > 200 {
            return Err(Error::Config(format!("max degree {} outside 1..=200", self.max_degree)));
        }
        if self.moore_n < 2 {
            return Err(Error::Config(format!("Moore space P^{}(2) needs n >= 2", self.moore_n)));
        }
        for &p in &self.primes {
            PrimeField::new(p)?;
        }
        Ok(())
    }

    fn sampling(&self, tag: &[u64]) -> ExponentSampling {
        ExponentSampling {
            exponents: self.exponents.clone(),
            seed: mix_seed(self.seed, tag),
        }
    }

    fn rng(&self, tag: &[u64]) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(mix_seed(self.seed, tag))
    }
}

/// Derives an independent seed per grid point (splitmix64 steps).
fn mix_seed(seed: u64, tag: &[u64]) -> u64 {
    let mut state = seed;
    for &t in tag {
        state = state.wrapping_add(t).wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        state = z ^ (z >> 31);
    }
    state
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("PASS"),
            Verdict::Fail => f.write_str("FAIL"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub anchor: String,
    pub params: Map<String, Value>,
    pub verdict: Verdict,
    pub duration_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Counts comparisons and keeps the first failure.
struct Probe {
    checked: usize,
    failure: Option<Value>,
}

impl Probe {
    fn new() -> Self {
        Self {
            checked: 0,
            failure: None,
        }
    }

    fn compare(&mut self, input: impl FnOnce() -> String, lhs: &CoordinateSeries, rhs: &CoordinateSeries) {
        self.checked += 1;
        if lhs != rhs && self.failure.is_none() {
            self.failure = Some(json!({
                "input": input(),
                "lhs": lhs.to_coefficient_map(),
                "rhs": rhs.to_coefficient_map(),
            }));
        }
    }

    fn expect_one(&mut self, input: impl FnOnce() -> String, value: &CoordinateSeries) {
        self.compare(input, value, &CoordinateSeries::one(value.context()));
    }

    fn assert(&mut self, ok: bool, detail: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(detail());
        }
    }

    fn fail(&mut self, detail: Value) {
        self.assert(false, || detail);
    }
}

struct Params(Map<String, Value>);

impl Params {
    fn new() -> Self {
        Self(Map::new())
    }

    fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.insert(key.to_string(), value.into());
        self
    }
}

fn finish(check: CheckName, params: Params, probe: Probe, start: Instant, timings: bool) -> VerificationReport {
    let mut params = params.0;
    params.insert("checked".into(), probe.checked.into());
    VerificationReport {
        check: check.name().to_string(),
        anchor: check.anchor().to_string(),
        params,
        verdict: if probe.failure.is_none() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        duration_ms: timings.then(|| start.elapsed().as_millis() as u64),
        counterexample: probe.failure,
    }
}

/// Runs the selected checks in their canonical order. Reports come back in
/// submission order regardless of scheduling.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    config.validate()?;
    let mut checks = config.checks.clone();
    checks.sort();
    checks.dedup();
    let batches = checks
        .par_iter()
        .map(|&check| run_check(check, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(batches.into_iter().flatten().collect())
}

pub fn run_check(check: CheckName, config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    match check {
        CheckName::Lemma22 => grid(config, check, lemma22_points(config), lemma22),
        CheckName::Lemma23Oracle => grid(config, check, lemma23_points(config), lemma23_oracle),
        CheckName::Lemma33 => grid(config, check, lemma33_points(config), lemma33),
        CheckName::Lemma34 => grid(config, check, nk_points(config, 2), lemma34),
        CheckName::Lemma35 => grid(config, check, lemma35_points(config), lemma35),
        CheckName::Remark36 => remark36(config),
        CheckName::Theorem38 => grid(config, check, nk_points(config, 2), theorem38),
        CheckName::Prop314 => grid(config, check, prop314_points(config), prop314),
        CheckName::Example316 => Ok(vec![example316(config)]),
        CheckName::BetaIdempotent => beta_idempotent(config),
        CheckName::WittAgreement => witt_agreement(config),
        CheckName::Decomposition => decomposition(config),
    }
}

type PointCheck = fn(&SuiteConfig, &[usize]) -> Result<(Params, Probe)>;

fn grid(
    config: &SuiteConfig,
    check: CheckName,
    points: Vec<Vec<usize>>,
    run: PointCheck,
) -> Result<Vec<VerificationReport>> {
    points
        .par_iter()
        .map(|point| {
            let start = Instant::now();
            let (params, probe) = run(config, point)?;
            Ok(finish(check, params, probe, start, config.timings))
        })
        .collect()
}

fn nk_points(config: &SuiteConfig, min_n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for n in min_n..=config.max_n {
        for k in 1..=config.max_k {
            out.push(vec![n, k]);
        }
    }
    out
}

/// Every sequence in `{1..n}^len`, or a seeded sample when there are too many.
fn index_sequences(n: usize, len: usize, rng: &mut impl Rng) -> Vec<Vec<usize>> {
    let total = (n as f64).powi(len as i32);
    if total > EXHAUSTIVE_LIMIT as f64 {
        return (0..SAMPLED_SEQUENCES)
            .map(|_| (0..len).map(|_| rng.gen_range(1..=n)).collect())
            .collect();
    }
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=n).map(move |i| {
                    let mut next = prefix.clone();
                    next.push(i);
                    next
                })
            })
            .collect();
    }
    out
}

fn has_repeat(indices: &[usize]) -> bool {
    indices.iter().enumerate().any(|(i, x)| indices[..i].contains(x))
}

fn generators(context: RingContext, indices: &[usize], exponents: &[i64]) -> Result<Vec<GroupWord>> {
    indices
        .chunks(context.arity)
        .zip(exponents)
        .map(|(chunk, &m)| GroupWord::generator(context, TupleLetter::new(chunk.to_vec())?, m))
        .collect()
}

fn product(values: &[i64]) -> BigInt {
    values.iter().map(|&v| BigInt::from(v)).product()
}

fn lemma22_points(config: &SuiteConfig) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in 1..=config.max_k {
        for n in k.max(1)..=config.max_n {
            out.push(vec![n, k]);
        }
    }
    out
}

fn lemma22(config: &SuiteConfig, point: &[usize]) -> Result<(Params, Probe)> {
    let (n, k) = (point[0], point[1]);
    let context = RingContext::new(n, k)?;
    let sampling = config.sampling(&[22, n as u64, k as u64]);
    let mut rng = sampling.rng();
    let mut probe = Probe::new();
    let tuples = index_sequences(n, k, &mut rng);

    // (1) repeated indices give the trivial class
    for tuple in tuples.iter().filter(|t| has_repeat(t)) {
        for &m in &config.exponents {
            let word = GroupWord::generator(context, TupleLetter::new(tuple.clone())?, m)?;
            probe.expect_one(|| word.to_string(), &word.rho());
        }
    }
    // (2) power-map decorations multiply the exponent
    for tuple in &tuples {
        let letter = TupleLetter::new(tuple.clone())?;
        let decorations: Vec<i64> = (0..k).map(|_| sampling.draw(&mut rng)).collect();
        let m = sampling.draw(&mut rng);
        let decorated = GeneratorPower::decorated(letter.clone(), m, &decorations)?;
        let lhs = GroupWord::from_factors(context, [decorated])?.rho();
        let total = product(&decorations) * m;
        let rhs = GroupWord::generator(context, letter, 1)?.rho().pow(&total)?;
        probe.compare(|| format!("{tuple:?} decorations {decorations:?} exponent {m}"), &lhs, &rhs);
    }
    // (3) commutators with a repeated index vanish
    let mut repeated = 0;
    for l in 2..=config.max_l {
        for seq in index_sequences(n, k * l, &mut rng).into_iter().filter(|s| has_repeat(s)) {
            let word = commutator(&generators(context, &seq, &vec![1; l])?)?;
            probe.expect_one(|| format!("[[{seq:?}]] in blocks of {k}"), &word.rho());
            repeated += 1;
        }
    }
    // (4) exponents come out of a commutator as their product
    for _ in 0..config.lemma22_draws {
        let l = rng.gen_range(2..=config.max_l.max(2));
        let seq: Vec<usize> = (0..k * l).map(|_| rng.gen_range(1..=n)).collect();
        let exps: Vec<i64> = (0..l).map(|_| sampling.draw(&mut rng)).collect();
        let lhs = commutator(&generators(context, &seq, &exps)?)?.rho();
        let rhs = commutator(&generators(context, &seq, &vec![1; l])?)?
            .rho()
            .pow(&product(&exps))?;
        probe.compare(|| format!("[[{seq:?}]] in blocks of {k}, exponents {exps:?}"), &lhs, &rhs);
    }
    let params = Params::new()
        .with("n", n)
        .with("k", k)
        .with("max_l", config.max_l)
        .with("tuples", tuples.len())
        .with("repeated_commutators", repeated)
        .with("draws", config.lemma22_draws);
    Ok((params, probe))
}

fn lemma23_points(config: &SuiteConfig) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for n in 1..=config.oracle_max_n {
        for k in 1..=config.max_k {
            out.push(vec![n, k]);
        }
    }
    out
}

fn lemma23_oracle(config: &SuiteConfig, point: &[usize]) -> Result<(Params, Probe)> {
    let (n, k) = (point[0], point[1]);
    let mut probe = Probe::new();
    let indices: Vec<usize> = (1..=n).collect();
    let lhs = hopf_star(k, &GroupWord::standard(n)?)?.rho();
    let rhs = james_hopf_pointwise(k, &LetterWord::coordinates(n, &indices)?)?
        .to_group_word()
        .rho();
    probe.compare(|| format!("H_{k}(x_1...x_{n})"), &lhs, &rhs);

    // the formula does not see how a power is split into adjacent factors
    let sampling = config.sampling(&[23, n as u64, k as u64]);
    let mut rng = sampling.rng();
    for _ in 0..config.samples {
        let len = rng.gen_range(1..=5);
        let word = random_coordinate_word(n, len, &sampling, &mut rng)?;
        let pos = rng.gen_range(0..word.len().max(1));
        let mut split = Vec::new();
        for (i, f) in word.factors().iter().enumerate() {
            if i == pos {
                let a = sampling.draw(&mut rng);
                split.push(GeneratorPower::new(f.letter.clone(), a));
                split.push(GeneratorPower::new(f.letter.clone(), &f.exponent - a));
            } else {
                split.push(f.clone());
            }
        }
        let split = GroupWord::from_factors(word.context(), split)?;
        let lhs = hopf_star(k, &word)?.rho();
        let rhs = hopf_star(k, &split)?.rho();
        probe.compare(|| format!("H_{k}({word}) vs H_{k}({split})"), &lhs, &rhs);
    }
    Ok((Params::new().with("n", n).with("k", k), probe))
}

fn random_tuple_word(
    context: RingContext,
    len: usize,
    sampling: &ExponentSampling,
    rng: &mut impl Rng,
) -> Result<GroupWord> {
    let factors = (0..len)
        .map(|_| {
            let indices: Vec<usize> = (0..context.arity).map(|_| rng.gen_range(1..=context.n)).collect();
            Ok(GeneratorPower::new(TupleLetter::new(indices)?, sampling.draw(rng)))
        })
        .collect::<Result<Vec<_>>>()?;
    GroupWord::from_factors(context, factors)
}

fn lemma33_points(config: &SuiteConfig) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for n in 2..=config.max_n {
        for k in 1..=config.max_k {
            for l in 1..=config.max_l {
                if k + l <= n {
                    out.push(vec![n, k, l]);
                }
            }
        }
    }
    out
}

fn lemma33(config: &SuiteConfig, point: &[usize]) -> Result<(Params, Probe)> {
    let (n, k, l) = (point[0], point[1], point[2]);
    let context = RingContext::new(n, k)?;
    let sampling = config.sampling(&[33, n as u64, k as u64, l as u64]);
    let mut rng = sampling.rng();
    let mut probe = Probe::new();
    for _ in 0..config.samples {
        let a = random_tuple_word(context, rng.gen_range(1..=4), &sampling, &mut rng)?;
        let b = random_tuple_word(context, rng.gen_range(1..=4), &sampling, &mut rng)?;
        let indices: Vec<usize> = (0..l).map(|_| rng.gen_range(1..=n)).collect();
        let decorations: Vec<i64> = (0..l).map(|_| sampling.draw(&mut rng)).collect();
        let g = GeneratorPower::decorated(TupleLetter::new(indices)?, 1, &decorations)?;
        let ab = tensor_generator(&a.concat(&b)?, &g)?.rho();
        let ba = tensor_generator(&b.concat(&a)?, &g)?.rho();
        let split = tensor_generator(&a, &g)?.rho().mul(&tensor_generator(&b, &g)?.rho())?;
        let inverse = tensor_generator(&a.inverse(), &g)?.rho();
        let input = || format!("a = {a}, b = {b}, g = {g}");
        probe.compare(input, &ab, &ba);
        probe.compare(input, &ab, &split);
        probe.compare(input, &inverse, &tensor_generator(&a, &g)?.rho().inverse()?);
    }
    Ok((Params::new().with("n", n).with("k", k).with("l", l), probe))
}

/// Sample inputs `a` cycling through generator words and 2- and 3-fold commutators.
fn hopf_inputs(config: &SuiteConfig, n: usize, tag: &[u64]) -> Result<Vec<GroupWord>> {
    let sampling = config.sampling(tag);
    let mut rng = sampling.rng();
    let per_family = config.samples.div_ceil(3);
    let double = gamma_test_elements(n, 2, per_family, &sampling)?;
    let triple = gamma_test_elements(n, 3, per_family, &sampling)?;
    let mut out = Vec::new();
    for i in 0..per_family {
        out.push(random_coordinate_word(n, rng.gen_range(1..=4), &sampling, &mut rng)?);
        out.extend(double.get(i).cloned());
        out.extend(triple.get(i).cloned());
    }
    out.truncate(config.samples);
    Ok(out)
}

fn lemma34(config: &SuiteConfig, point: &[usize]) -> Result<(Params, Probe)> {
    let (n, k) = (point[0], point[1]);
    let tag = [34, n as u64, k as u64];
    let sampling = config.sampling(&tag);
    let mut rng = config.rng(&[34, n as u64, k as u64, 1]);
    let mut probe = Probe::new();
    for a in hopf_inputs(config, n, &tag)? {
        let y = random_coordinate_word(n, rng.gen_range(1..=3), &sampling, &mut rng)?;
        let lhs = hopf_star(k, &a.concat(&y)?)?.rho();
        for &policy in &config.order_policies {
            let rhs = hopf_expand_product(k, &a, &y, policy)?.rho();
            probe.compare(|| format!("a = {a}, y = {y}, order {policy}"), &lhs, &rhs);
        }
    }
    let policies: Vec<String> = config.order_policies.iter().map(ToString::to_string).collect();
    Ok((Params::new().with("n", n).with("k", k).with("policies", policies), probe))
}

fn lemma35_points(config: &SuiteConfig) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for m in 2..=4 {
        for k in 1..m {
            if m + 1 <= config.oracle_max_n.max(config.max_n) {
                out.push(vec![m, k]);
            }
        }
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

fn lemma35(config: &SuiteConfig, point: &[usize]) -> Result<(Params, Probe)> {
    let (m, k) = (point[0], point[1]);
    let n = m + 1;
    let sampling = config.sampling(&[35, m as u64, k as u64]);
    let mut rng = sampling.rng();
    let mut probe = Probe::new();
    for j in 1..=n {
        let others: Vec<usize> = (1..=n).filter(|&i| i != j).collect();
        for order in permutations(&others) {
            for pass in 0..3 {
                let draw = |rng: &mut ChaCha8Rng| if pass == 0 { 1 } else { sampling.draw(rng) };
                let factors: Vec<(usize, i64)> = order.iter().map(|&i| (i, draw(&mut rng))).collect();
                let entries = factors
                    .iter()
                    .map(|&f| GroupWord::coordinates(n, &[f]))
                    .collect::<Result<Vec<_>>>()?;
                let g = GeneratorPower::new(TupleLetter::single(j)?, draw(&mut rng));
                let value = tensor_generator(&hopf_star(k, &commutator(&entries)?)?, &g)?.rho();
                probe.expect_one(|| format!("H_{k}([[{factors:?}]]) (x) {g}"), &value);
            }
        }
    }
    Ok((Params::new().with("n", n).with("k", k).with("m", m), probe))
}

fn remark36(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for witness in remark36_witnesses()? {
        let start = Instant::now();
        let mut probe = Probe::new();
        let (lhs, rhs) = (witness.lhs.rho(), witness.rhs.rho());
        probe.compare(|| witness.name.to_string(), &lhs, &rhs);
        probe.assert(witness.is_nontrivial(), || {
            json!({ "input": witness.name, "lhs": lhs.to_coefficient_map(), "rhs": "expected a value other than 1" })
        });
        let params = Params::new()
            .with("witness", witness.name)
            .with("value", lhs.to_string());
        out.push(finish(CheckName::Remark36, params, probe, start, config.timings));
    }
    Ok(out)
}

fn theorem38(config: &SuiteConfig, point: &[usize]) -> Result<(Params, Probe)> {
    let (n, k) = (point[0], point[1]);
    let sampling = config.sampling(&[38, n as u64, k as u64]);
    let mut rng = config.rng(&[38, n as u64, k as u64, 1]);
    let mut probe = Probe::new();
    // commutators of class exactly k (at least 2) and one more
    let class = k.max(2);
    let half = config.samples.div_ceil(2);
    let mut inputs = gamma_test_elements(n, class, half, &sampling)?;
    inputs.extend(gamma_test_elements(n, class + 1, config.samples - half, &sampling)?);
    for a in &inputs {
        let y = random_coordinate_word(n, rng.gen_range(1..=3), &sampling, &mut rng)?;
        let lhs = hopf_star(k, &a.concat(&y)?)?.rho();
        let rhs = hopf_star(k, a)?.rho().mul(&hopf_star(k, &y)?.rho())?;
        probe.compare(|| format!("a = {a}, y = {y}"), &lhs, &rhs);
    }
    let params = Params::new()
        .with("n", n)
        .with("k", k)
        .with("classes", vec![class, class + 1]);
    Ok((params, probe))
}

const PROP314_SHAPES: [(usize, usize); 3] = [(2, 2), (2, 3), (3, 2)];

fn prop314_points(config: &SuiteConfig) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for n in 1..=config.oracle_max_n {
        for (k, l) in PROP314_SHAPES {
            if k * l <= n {
                out.push(vec![n, k, l]);
            }
        }
    }
    out
}

fn prop314(config: &SuiteConfig, point: &[usize]) -> Result<(Params, Probe)> {
    let (n, k, l) = (point[0], point[1], point[2]);
    let mut probe = Probe::new();
    let check = verify_prop314_ordered(n, k, l, config.shuffle_order)?;
    probe.compare(
        || format!("H_{l} o H_{k} vs L_{k},{l} o H_{} on x_1...x_{n}", k * l),
        &check.composite,
        &check.shuffled,
    );
    let mut orders = vec![config.shuffle_order.to_string()];
    if config.order_independence {
        for order in [ShuffleOrder::Canonical, ShuffleOrder::Reversed, ShuffleOrder::Shuffled(config.seed)] {
            if order == config.shuffle_order {
                continue;
            }
            let other = verify_prop314_ordered(n, k, l, order)?;
            probe.compare(|| format!("shuffle order {order} vs {}", config.shuffle_order), &other.shuffled, &check.shuffled);
            orders.push(order.to_string());
        }
    }
    let params = Params::new()
        .with("n", n)
        .with("k", k)
        .with("l", l)
        .with("orders", orders)
        .with("terms", check.composite.num_terms());
    Ok((params, probe))
}

fn example316(config: &SuiteConfig) -> VerificationReport {
    let start = Instant::now();
    let mut probe = Probe::new();
    let mut found: Vec<Vec<usize>> = grouped_shuffles(2, 2).iter().map(|s| s.flattened()).collect();
    found.sort();
    let mut expected = vec![vec![2, 3, 1, 4], vec![1, 3, 2, 4], vec![1, 2, 3, 4]];
    expected.sort();
    probe.assert(found == expected, || json!({ "input": "grouped_shuffles(2,2)", "lhs": found, "rhs": expected }));
    for degree in 1..=8u32 {
        let value = koszul_degree(2, 2, degree);
        let expected = 2 + if degree % 2 == 0 { 1 } else { -1 };
        probe.assert(value == expected, || {
            json!({ "input": format!("koszul_degree(2,2,{degree})"), "lhs": value, "rhs": expected })
        });
    }
    let params = Params::new().with("k", 2).with("l", 2).with("degrees", "1..=8");
    finish(CheckName::Example316, params, probe, start, config.timings)
}

fn idempotency_report<F: Field>(
    config: &SuiteConfig,
    n: usize,
    alphabets: &[GradedAlphabet],
    mode: SignMode,
    field: &F,
    field_name: String,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut probe = Probe::new();
    let mut words = 0;
    for alphabet in alphabets {
        let verdict = check_idempotent(n, alphabet, mode, field)?;
        words += verdict.words_checked;
        match verdict.counterexample {
            Some(failure) => probe.fail(json!({
                "input": failure.word,
                "lhs": failure.lhs,
                "rhs": failure.rhs,
            })),
            None => probe.assert(true, || Value::Null),
        }
    }
    let degrees: Vec<Vec<u32>> = alphabets
        .iter()
        .map(|a| (0..a.len() as u16).map(|l| a.degree(l)).collect())
        .collect();
    let params = Params::new()
        .with("n", n)
        .with("field", field_name)
        .with("mode", mode.to_string())
        .with("letter_degrees", json!(degrees))
        .with("words", words);
    Ok(finish(CheckName::BetaIdempotent, params, probe, start, config.timings))
}

fn beta_idempotent(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let ungraded: Vec<GradedAlphabet> = (1..=config.beta_max_d).map(|d| GradedAlphabet::uniform(d, 0)).collect();
    let graded = vec![
        GradedAlphabet::uniform(1, 1),
        GradedAlphabet::uniform(2, 1),
        GradedAlphabet::from_degree_counts(&[0, 1, 1]),
    ];
    let mut jobs: Vec<(usize, Option<u64>, SignMode)> = Vec::new();
    for n in 2..=config.beta_max_n {
        jobs.push((n, None, SignMode::Ungraded));
        for &p in &config.primes {
            if n as u64 % p != 0 {
                jobs.push((n, Some(p), SignMode::Ungraded));
            }
        }
    }
    for n in 2..=config.beta_max_n.min(4) {
        jobs.push((n, None, SignMode::Graded));
    }
    jobs.par_iter()
        .map(|&(n, p, mode)| {
            let alphabets = if mode == SignMode::Graded { &graded } else { &ungraded };
            match p {
                None => idempotency_report(config, n, alphabets, mode, &Rationals, "Q".into()),
                Some(p) => idempotency_report(config, n, alphabets, mode, &PrimeField::new(p)?, format!("F{p}")),
            }
        })
        .collect()
}

fn witt_agreement(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let mut out: Vec<VerificationReport> = (1..=config.witt_max_n)
        .into_par_iter()
        .map(|n| {
            let start = Instant::now();
            let mut probe = Probe::new();
            let mut ranks = Vec::new();
            for d in 1..=config.witt_max_d {
                let rank = lie_rank(n, &GradedAlphabet::uniform(d, 0), &Rationals, SignMode::Ungraded)?.total;
                let formula = witt(n as u64, d as u64);
                probe.assert(formula == BigInt::from(rank), || {
                    json!({ "input": format!("n={n} d={d}"), "lhs": rank, "rhs": formula.to_string() })
                });
                ranks.push(rank);
            }
            let params = Params::new().with("n", n).with("max_d", config.witt_max_d).with("ranks", ranks);
            Ok(finish(CheckName::WittAgreement, params, probe, start, config.timings))
        })
        .collect::<Result<_>>()?;
    let start = Instant::now();
    let mut probe = Probe::new();
    let spot = witt(6, 2);
    probe.assert(spot == BigInt::from(9), || json!({ "input": "witt(6,2)", "lhs": spot.to_string(), "rhs": 9 }));
    let params = Params::new().with("n", 6).with("d", 2).with("formula_only", true);
    out.push(finish(CheckName::WittAgreement, params, probe, start, config.timings));
    Ok(out)
}

/// A general instance of the decomposition with letters in two degrees.
pub fn mixed_instance(truncation: usize) -> SeriesInstance {
    SeriesInstance {
        name: "thm16".into(),
        description: "one class each in degrees 1 and 2, p = 5, k_j in {2, 3, 7}".into(),
        p: 5,
        v: PowerSeries::new(vec![0, 1, 1], truncation),
        ks: vec![2, 3, 7],
    }
}

/// The named decomposition instances at a given truncation.
pub fn series_instances(config: &SuiteConfig) -> Result<Vec<SeriesInstance>> {
    Ok(vec![
        mixed_instance(config.max_degree),
        cor41(config.max_degree),
        cor42(config.moore_n, config.max_degree)?,
    ])
}

fn decomposition(config: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let instances = series_instances(config)?;
    let mut out: Vec<VerificationReport> = instances
        .par_iter()
        .map(|instance| {
            let start = Instant::now();
            let mut probe = Probe::new();
            let d = instance.run(config.sign_mode, LnMethod::Auto)?;
            let one_minus_v = PowerSeries::one(d.truncation).sub(&instance.v)?;
            let unit = james_series(&instance.v)?.mul(&one_minus_v)?;
            probe.assert(unit == PowerSeries::one(d.truncation), || {
                json!({ "input": "james_series(v) * (1 - v)", "lhs": unit, "rhs": PowerSeries::one(d.truncation) })
            });
            probe.assert(d.nonnegative, || json!({ "input": "residual", "lhs": d.residual, "rhs": "nonnegative" }));
            probe.assert(d.dominated, || json!({ "input": "product of factors", "lhs": d.product, "rhs": d.james }));
            let ks: Vec<usize> = d.factors.iter().map(|f| f.k).collect();
            let params = Params::new()
                .with("instance", instance.name.clone())
                .with("p", instance.p)
                .with("mode", config.sign_mode.to_string())
                .with("max_degree", d.truncation)
                .with("v", json!(instance.v))
                .with("ks", ks)
                .with("residual", json!(d.residual));
            Ok(finish(CheckName::Decomposition, params, probe, start, config.timings))
        })
        .collect::<Result<_>>()?;

    let start = Instant::now();
    let mut probe = Probe::new();
    let cases: [(&[usize], u64, bool); 4] = [(&[2, 4], 3, false), (&[3], 3, false), (&[2, 5, 7], 3, true), (&[], 3, true)];
    for (ks, p, valid) in cases {
        let accepted = validate_ks(ks, p).is_ok();
        probe.assert(accepted == valid, || {
            json!({ "input": format!("ks = {ks:?}, p = {p}"), "lhs": accepted, "rhs": valid })
        });
    }
    out.push(finish(
        CheckName::Decomposition,
        Params::new().with("instance", "validator"),
        probe,
        start,
        config.timings,
    ));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format '{other}' (expected text or json)"))),
        }
    }
}

fn render_value(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Renders reports. JSON output is a single array, pretty-printed with a
/// trailing newline; text output is one line per report.
pub fn emit(reports: &[VerificationReport], format: Format) -> String {
    match format {
        Format::Json => {
            let mut out = serde_json::to_string_pretty(reports).expect("reports serialize");
            out.push('\n');
            out
        }
        Format::Text => {
            let mut out = String::new();
            for r in reports {
                let _ = write!(out, "{} {}", r.verdict, r.check);
                for (key, value) in &r.params {
                    let _ = write!(out, " {key}={}", render_value(value));
                }
                if let Some(ms) = r.duration_ms {
                    let _ = write!(out, " ({ms} ms)");
                }
                out.push('\n');
                if let Some(c) = &r.counterexample {
                    let _ = writeln!(out, "  counterexample: {c}");
                }
            }
            out
        }
    }
}

/// 0 when every report passes, 1 otherwise.
pub fn exit_code(reports: &[VerificationReport]) -> i32 {
    if reports.iter().all(VerificationReport::passed) {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SuiteConfig {
        SuiteConfig {
            max_n: 4,
            oracle_max_n: 5,
            max_k: 2,
            max_l: 2,
            lemma22_draws: 50,
            samples: 12,
            beta_max_n: 4,
            beta_max_d: 2,
            witt_max_n: 4,
            witt_max_d: 2,
            max_degree: 12,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn check_names_round_trip() {
        for c in CheckName::ALL {
            assert_eq!(c.name().parse::<CheckName>().unwrap(), c);
        }
        assert!("lemma99".parse::<CheckName>().is_err());
    }

    #[test]
    fn quick_suite_passes() {
        let reports = run_suite(&quick()).unwrap();
        for r in &reports {
            assert!(r.passed(), "{}", emit(std::slice::from_ref(r), Format::Text));
        }
        let checks: Vec<&str> = reports.iter().map(|r| r.check.as_str()).collect();
        let mut first_seen = checks.clone();
        first_seen.dedup();
        let expected: Vec<&str> = CheckName::ALL.iter().map(|c| c.name()).collect();
        assert_eq!(first_seen, expected);
        assert_eq!(exit_code(&reports), 0);
    }

    #[test]
    fn empty_selection_is_empty_report() {
        let config = SuiteConfig {
            checks: Vec::new(),
            ..quick()
        };
        let reports = run_suite(&config).unwrap();
        assert!(reports.is_empty());
        assert_eq!(exit_code(&reports), 0);
        assert_eq!(emit(&reports, Format::Json), "[]\n");
    }

    #[test]
    fn corrupted_shuffle_order_still_passes() {
        let config = SuiteConfig {
            checks: vec![CheckName::Prop314],
            shuffle_order: ShuffleOrder::Shuffled(7),
            order_independence: false,
            ..quick()
        };
        let reports = run_suite(&config).unwrap();
        assert!(!reports.is_empty());
        assert!(reports.iter().all(VerificationReport::passed));
    }

    #[test]
    fn config_caps() {
        let config = SuiteConfig {
            max_n: 11,
            ..SuiteConfig::default()
        };
        assert!(matches!(run_suite(&config), Err(Error::Config(_))));
        let config = SuiteConfig {
            primes: vec![4],
            ..SuiteConfig::default()
        };
        assert!(config.validate().is_err());
    }

    #[test]
    fn json_is_deterministic() {
        let config = SuiteConfig {
            checks: vec![CheckName::Lemma34, CheckName::Theorem38, CheckName::Decomposition],
            ..quick()
        };
        let a = emit(&run_suite(&config).unwrap(), Format::Json);
        let b = emit(&run_suite(&config).unwrap(), Format::Json);
        assert_eq!(a, b);
        let first: Value = serde_json::from_str(&a).unwrap();
        let keys: Vec<&String> = first[0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["check", "anchor", "params", "verdict", "duration_ms"]);
    }

    #[test]
    fn text_and_json_rendering() {
        let mut probe = Probe::new();
        probe.assert(true, || Value::Null);
        let pass = finish(
            CheckName::Lemma23Oracle,
            Params::new().with("n", 8).with("k", 3),
            probe,
            Instant::now(),
            false,
        );
        assert_eq!(emit(&[pass.clone()], Format::Text), "PASS lemma23-oracle n=8 k=3 checked=1\n");

        let context = RingContext::new(2, 1).unwrap();
        let mut probe = Probe::new();
        let x1 = GroupWord::coordinates(2, &[(1, 1)]).unwrap().rho();
        probe.compare(|| "x1".into(), &x1, &CoordinateSeries::one(context));
        let fail = finish(CheckName::Lemma22, Params::new(), probe, Instant::now(), false);
        let json: Value = serde_json::from_str(&emit(&[fail.clone()], Format::Json)).unwrap();
        assert_eq!(json[0]["verdict"], "fail");
        assert_eq!(json[0]["counterexample"]["lhs"]["e(1)"], "1");
        assert_eq!(json[0]["counterexample"]["rhs"]["1"], "1");
        assert_eq!(exit_code(&[pass, fail]), 1);
    }

    #[test]
    fn seeds_decorrelate_points() {
        assert_ne!(mix_seed(1, &[34, 3, 2]), mix_seed(1, &[34, 2, 3]));
        assert_eq!(mix_seed(5, &[1, 2]), mix_seed(5, &[1, 2]));
    }
}
