//! Length-sensitivity evaluation methods and parameter sweeps.
//!
//! Each method turns one text into a row of scores, one per length
//! condition. Randomness comes from per-(text, condition) ChaCha streams, so
//! a row never depends on which other rows or conditions were computed or on
//! how work was scheduled across threads.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{Corpus, Text};
use crate::error::{LexdivError, Result};
use crate::indices::{IndexKind, IndexSpec};
use crate::matrix::{MatrixMeta, ScoreMatrix};
use crate::numerics::CompensatedSum;

pub const DEFAULT_ITERATIONS: usize = 10_000;
pub const DEFAULT_DIVISORS: [usize; 4] = [1, 2, 3, 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Parallel,
    Random,
    OrderedRandom,
    Alternating,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Parallel,
        Method::Random,
        Method::OrderedRandom,
        Method::Alternating,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Parallel => "parallel",
            Method::Random => "random",
            Method::OrderedRandom => "ordered",
            Method::Alternating => "alternating",
        }
    }

    /// Key for RNG streams. Random and ordered random share one so that they
    /// analyze the same token samples.
    fn stream_family(self) -> &'static str {
        match self {
            Method::Parallel => "parallel",
            Method::Random | Method::OrderedRandom => "random",
            Method::Alternating => "alternating",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = LexdivError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parallel" => Ok(Method::Parallel),
            "random" => Ok(Method::Random),
            "ordered" | "ordered_random" | "ordered-random" => Ok(Method::OrderedRandom),
            "alternating" => Ok(Method::Alternating),
            other => Err(LexdivError::invalid(format!("unknown method `{other}`"))),
        }
    }
}

/// How the length conditions are specified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conditions {
    /// Divide the truncated text by each value (parallel, random, ordered)
    /// or take one token out of each k (alternating).
    Divisors(Vec<usize>),
    /// Explicit sample lengths; random and ordered random only.
    Lengths(Vec<usize>),
}

impl Default for Conditions {
    fn default() -> Self {
        Conditions::Divisors(DEFAULT_DIVISORS.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub method: Method,
    pub truncate_to: usize,
    pub conditions: Conditions,
    pub iterations: usize,
    pub master_seed: u64,
}

impl SamplingConfig {
    pub fn new(method: Method, truncate_to: usize) -> Self {
        SamplingConfig {
            method,
            truncate_to,
            conditions: Conditions::default(),
            iterations: DEFAULT_ITERATIONS,
            master_seed: crate::DEFAULT_SEED,
        }
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_conditions(mut self, conditions: Conditions) -> Self {
        self.conditions = conditions;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(LexdivError::invalid("iterations must be at least 1"));
        }
        let list = match &self.conditions {
            Conditions::Divisors(d) => d,
            Conditions::Lengths(l) => {
                if !matches!(self.method, Method::Random | Method::OrderedRandom) {
                    return Err(LexdivError::invalid(format!(
                        "explicit lengths are not supported by the {} method",
                        self.method
                    )));
                }
                l
            }
        };
        if list.len() < 2 {
            return Err(LexdivError::invalid("at least two conditions are required"));
        }
        if list.contains(&0) {
            return Err(LexdivError::invalid("conditions must be positive"));
        }
        if self.truncate_to == 0 {
            return Err(LexdivError::invalid("truncation length must be at least 1"));
        }
        Ok(())
    }
}

/// One text's scores across conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledRow {
    /// Sample or segment length of each condition.
    pub lengths: Vec<usize>,
    pub scores: Vec<f64>,
    /// Number of leading tokens the method analyzed.
    pub effective_len: usize,
}

/// 64-bit seed derived from an arbitrary key.
pub fn stream_seed(parts: &[&str]) -> u64 {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("32-byte digest"))
}

/// Seed for one text under one method family.
pub fn text_seed(master_seed: u64, text_id: &str, method: Method) -> u64 {
    stream_seed(&[&master_seed.to_string(), text_id, method.stream_family()])
}

fn condition_rng(seed: u64, condition: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(condition as u64);
    rng
}

fn condition_error(condition: impl fmt::Display, message: impl Into<String>) -> LexdivError {
    LexdivError::Condition {
        condition: condition.to_string(),
        message: message.into(),
    }
}

fn check_prefix(tokens: &[u32], len: usize) -> Result<&[u32]> {
    if len == 0 {
        return Err(LexdivError::invalid("truncation length must be at least 1"));
    }
    if len > tokens.len() {
        return Err(LexdivError::TooShort {
            len: tokens.len(),
            requested: len,
        });
    }
    Ok(&tokens[..len])
}

fn check_length_for_spec(spec: &IndexSpec, condition: usize, length: usize) -> Result<()> {
    if length < spec.min_tokens() {
        return Err(condition_error(
            condition,
            format!(
                "sample of {length} tokens is shorter than {} requires ({})",
                spec.kind,
                spec.min_tokens()
            ),
        ));
    }
    Ok(())
}

/// Truncates to `len` and, for each divisor d, averages the index over the d
/// contiguous segments of ⌊len/d⌋ tokens (remainder dropped).
pub fn parallel_sampling(
    tokens: &[u32],
    len: usize,
    divisors: &[usize],
    spec: &IndexSpec,
    seed: u64,
) -> Result<SampledRow> {
    let text = check_prefix(tokens, len)?;
    let mut lengths = Vec::with_capacity(divisors.len());
    let mut scores = Vec::with_capacity(divisors.len());
    for &d in divisors {
        if d == 0 || d > len {
            return Err(condition_error(d, "divisor must be in 1..=length"));
        }
        let seg = len / d;
        check_length_for_spec(spec, d, seg)?;
        let mut rng = condition_rng(seed, d);
        let mut sum = CompensatedSum::new();
        for chunk in text.chunks_exact(seg).take(d) {
            sum.add(spec.evaluate(chunk, &mut rng)?.value);
        }
        lengths.push(seg);
        scores.push(sum.total() / d as f64);
    }
    Ok(SampledRow {
        lengths,
        scores,
        effective_len: len,
    })
}

/// Order in which randomly drawn tokens are handed to the index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleOrder {
    /// Permutation order.
    Shuffled,
    /// Original text order.
    TextOrder,
}

/// Draws `iters` random m-subsets of positions 0..len via partial
/// Fisher-Yates on a persistent position vector and hands each to `visit`.
fn for_each_random_sample<R: Rng>(
    len: usize,
    m: usize,
    iters: usize,
    order: SampleOrder,
    rng: &mut R,
    mut visit: impl FnMut(&[usize], &mut R) -> Result<()>,
) -> Result<()> {
    let mut positions: Vec<usize> = (0..len).collect();
    let mut sorted = Vec::with_capacity(m);
    for _ in 0..iters {
        for i in 0..m {
            let j = rng.random_range(i..len);
            positions.swap(i, j);
        }
        match order {
            SampleOrder::Shuffled => visit(&positions[..m], rng)?,
            SampleOrder::TextOrder => {
                sorted.clear();
                sorted.extend_from_slice(&positions[..m]);
                sorted.sort_unstable();
                visit(&sorted, rng)?
            }
        }
    }
    Ok(())
}

/// Per-iteration index scores for random (or ordered random) samples of `m`
/// tokens from the first `len` tokens. Under a shared seed both orders see
/// the same token multiset in every iteration.
pub fn random_iteration_scores(
    tokens: &[u32],
    len: usize,
    m: usize,
    iters: usize,
    seed: u64,
    spec: &IndexSpec,
    order: SampleOrder,
) -> Result<Vec<f64>> {
    let text = check_prefix(tokens, len)?;
    if m == 0 || m > len {
        return Err(condition_error(m, format!("sample length must be in 1..={len}")));
    }
    check_length_for_spec(spec, m, m)?;
    let mut rng = condition_rng(seed, m);
    let mut out = Vec::with_capacity(iters);
    let mut sample = vec![0u32; m];
    for_each_random_sample(len, m, iters, order, &mut rng, |pos, rng| {
        for (slot, &p) in sample.iter_mut().zip(pos) {
            *slot = text[p];
        }
        out.push(spec.evaluate(&sample, rng)?.value);
        Ok(())
    })?;
    Ok(out)
}

fn random_row(
    tokens: &[u32],
    len: usize,
    lengths: &[usize],
    iters: usize,
    seed: u64,
    spec: &IndexSpec,
    order: SampleOrder,
) -> Result<SampledRow> {
    let text = check_prefix(tokens, len)?;
    if iters == 0 {
        return Err(LexdivError::invalid("iterations must be at least 1"));
    }
    let mut scores = Vec::with_capacity(lengths.len());
    for &m in lengths {
        if m == len {
            let mut rng = condition_rng(seed, m);
            check_length_for_spec(spec, m, m)?;
            scores.push(spec.evaluate(text, &mut rng)?.value);
            continue;
        }
        let per_iter = random_iteration_scores(tokens, len, m, iters, seed, spec, order)?;
        scores.push(per_iter.iter().copied().collect::<CompensatedSum>().total() / iters as f64);
    }
    Ok(SampledRow {
        lengths: lengths.to_vec(),
        scores,
        effective_len: len,
    })
}

/// For each m, the mean index over `iters` uniformly permuted samples of m
/// tokens (the first m of a fresh permutation). m = len is scored once.
pub fn random_sampling(
    tokens: &[u32],
    len: usize,
    lengths: &[usize],
    iters: usize,
    seed: u64,
    spec: &IndexSpec,
) -> Result<SampledRow> {
    random_row(tokens, len, lengths, iters, seed, spec, SampleOrder::Shuffled)
}

/// Same samples as [`random_sampling`] under the same seed, restored to text order.
pub fn ordered_random_sampling(
    tokens: &[u32],
    len: usize,
    lengths: &[usize],
    iters: usize,
    seed: u64,
    spec: &IndexSpec,
) -> Result<SampledRow> {
    random_row(tokens, len, lengths, iters, seed, spec, SampleOrder::TextOrder)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Largest multiple of lcm(k_values) not exceeding `len`.
pub fn alternating_effective_len(len: usize, k_values: &[usize]) -> Result<usize> {
    if k_values.contains(&0) {
        return Err(LexdivError::invalid("k values must be positive"));
    }
    let lcm = k_values.iter().fold(1usize, |acc, &k| acc / gcd(acc, k) * k);
    let eff = len / lcm * lcm;
    if eff == 0 {
        return Err(LexdivError::invalid(format!(
            "length {len} is shorter than lcm of k values ({lcm})"
        )));
    }
    Ok(eff)
}

/// One alternating draw: splits `text` into snippets of `k` tokens, permutes
/// each snippet independently, and returns the k order-preserving samples
/// formed by the j-th token of every snippet. `text.len()` must be a multiple of k.
pub fn alternating_samples<R: Rng + ?Sized>(text: &[u32], k: usize, rng: &mut R) -> Vec<Vec<u32>> {
    let snippets = text.len() / k;
    let mut samples = vec![Vec::with_capacity(snippets); k];
    fill_alternating(text, k, rng, &mut samples);
    samples
}

fn fill_alternating<R: Rng + ?Sized>(text: &[u32], k: usize, rng: &mut R, samples: &mut [Vec<u32>]) {
    let mut perm: Vec<usize> = (0..k).collect();
    for s in samples.iter_mut() {
        s.clear();
    }
    for snippet in text.chunks_exact(k) {
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i;
        }
        for i in (1..k).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }
        for (sample, &p) in samples.iter_mut().zip(&perm) {
            sample.push(snippet[p]);
        }
    }
}

/// Alternating token sampling: for each k, the mean index over the k
/// samples of every iteration. k = 1 scores the full text once.
pub fn alternating_sampling(
    tokens: &[u32],
    len: usize,
    k_values: &[usize],
    iters: usize,
    seed: u64,
    spec: &IndexSpec,
) -> Result<SampledRow> {
    check_prefix(tokens, len)?;
    if iters == 0 {
        return Err(LexdivError::invalid("iterations must be at least 1"));
    }
    let eff = alternating_effective_len(len, k_values)?;
    let text = &tokens[..eff];
    let mut lengths = Vec::with_capacity(k_values.len());
    let mut scores = Vec::with_capacity(k_values.len());
    for &k in k_values {
        let seg = eff / k;
        check_length_for_spec(spec, k, seg)?;
        let mut rng = condition_rng(seed, k);
        lengths.push(seg);
        if k == 1 {
            scores.push(spec.evaluate(text, &mut rng)?.value);
            continue;
        }
        let mut samples = vec![Vec::with_capacity(seg); k];
        let mut sum = CompensatedSum::new();
        for _ in 0..iters {
            fill_alternating(text, k, &mut rng, &mut samples);
            for s in &samples {
                sum.add(spec.evaluate(s, &mut rng)?.value);
            }
        }
        scores.push(sum.total() / (k * iters) as f64);
    }
    Ok(SampledRow {
        lengths,
        scores,
        effective_len: eff,
    })
}

fn method_row(text: &Text, config: &SamplingConfig, spec: &IndexSpec) -> Result<SampledRow> {
    let seed = text_seed(config.master_seed, text.id(), config.method);
    let tokens = text.codes();
    let len = config.truncate_to;
    let lengths = || -> Vec<usize> {
        match &config.conditions {
            Conditions::Divisors(d) => d.iter().map(|&d| len / d).collect(),
            Conditions::Lengths(l) => l.clone(),
        }
    };
    let divisors = match &config.conditions {
        Conditions::Divisors(d) => d.as_slice(),
        Conditions::Lengths(_) => &[],
    };
    match config.method {
        Method::Parallel => parallel_sampling(tokens, len, divisors, spec, seed),
        Method::Random => random_sampling(tokens, len, &lengths(), config.iterations, seed, spec),
        Method::OrderedRandom => {
            ordered_random_sampling(tokens, len, &lengths(), config.iterations, seed, spec)
        }
        Method::Alternating => {
            alternating_sampling(tokens, len, divisors, config.iterations, seed, spec)
        }
    }
}

/// Runs one evaluation method over every text of the corpus.
pub fn run_method(corpus: &Corpus, config: &SamplingConfig, spec: &IndexSpec) -> Result<ScoreMatrix> {
    config.validate()?;
    spec.validate()?;
    if corpus.is_empty() {
        return Err(LexdivError::invalid("corpus is empty"));
    }
    let rows: Vec<SampledRow> = corpus
        .texts()
        .par_iter()
        .map(|t| method_row(t, config, spec).map_err(|e| e.in_text(t.id())))
        .collect::<Result<_>>()?;
    let first = &rows[0];
    let labels = first.lengths.iter().map(usize::to_string).collect();
    let values = rows.iter().flat_map(|r| r.scores.iter().copied()).collect();
    let ids = corpus.texts().iter().map(|t| t.id().to_string()).collect();
    let stochastic = config.method != Method::Parallel || spec.kind.is_stochastic();
    let meta = MatrixMeta {
        method: config.method.name().to_string(),
        index: Some(spec.clone()),
        seed: Some(config.master_seed),
        iterations: stochastic.then_some(config.iterations),
        truncate_to: Some(config.truncate_to),
        effective_length: Some(first.effective_len),
    };
    Ok(ScoreMatrix::new(ids, labels, values)?.with_meta(meta))
}

/// Parameter values for a sweep: window/sample lengths or MTLD factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepValues {
    Lengths(Vec<usize>),
    Factors(Vec<f64>),
}

impl SweepValues {
    /// `start:end:step`, inclusive of `end` when the step lands on it.
    pub fn parse_lengths(s: &str) -> Result<Self> {
        let (start, end, step) = parse_range(s)?;
        let to_usize = |x: f64| -> Result<usize> {
            if x >= 1.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(LexdivError::invalid(format!("length `{x}` must be a positive integer")))
            }
        };
        let (start, end, step) = (to_usize(start)?, to_usize(end)?, to_usize(step)?);
        Ok(SweepValues::Lengths((start..=end).step_by(step).collect()))
    }

    pub fn parse_factors(s: &str) -> Result<Self> {
        let (start, end, step) = parse_range(s)?;
        let count = ((end - start) / step + 1e-9).floor() as usize + 1;
        let values = (0..count)
            .map(|i| ((start + i as f64 * step) * 1e6).round() / 1e6)
            .collect();
        Ok(SweepValues::Factors(values))
    }

    /// Factors 0.66 to 0.75 in steps of 0.01.
    pub fn default_mtld_factors() -> Self {
        SweepValues::Factors((66..=75).map(|i| i as f64 / 100.0).collect())
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            SweepValues::Lengths(v) => v.iter().map(usize::to_string).collect(),
            SweepValues::Factors(v) => v.iter().map(f64::to_string).collect(),
        }
    }

    fn len(&self) -> usize {
        match self {
            SweepValues::Lengths(v) => v.len(),
            SweepValues::Factors(v) => v.len(),
        }
    }
}

fn parse_range(s: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    let parse = |p: &str| -> Result<f64> {
        p.trim()
            .parse()
            .map_err(|_| LexdivError::invalid(format!("bad range component `{p}` in `{s}`")))
    };
    match parts.as_slice() {
        [a, b, c] => {
            let (a, b, c) = (parse(a)?, parse(b)?, parse(c)?);
            if !(c > 0.0) || b < a {
                return Err(LexdivError::invalid(format!("empty range `{s}`")));
            }
            Ok((a, b, c))
        }
        _ => Err(LexdivError::invalid(format!("expected start:end:step, got `{s}`"))),
    }
}

/// Scores the untruncated texts once per parameter value.
pub fn parameter_sweep(
    corpus: &Corpus,
    base: &IndexSpec,
    values: &SweepValues,
    master_seed: u64,
) -> Result<ScoreMatrix> {
    if corpus.is_empty() {
        return Err(LexdivError::invalid("corpus is empty"));
    }
    if values.len() < 2 {
        return Err(LexdivError::invalid("a sweep needs at least two parameter values"));
    }
    let specs: Vec<IndexSpec> = match (values, base.kind) {
        (SweepValues::Factors(f), IndexKind::Mtld) => {
            f.iter().map(|&x| base.clone().with_factor(x)).collect()
        }
        (SweepValues::Lengths(l), kind) if kind.uses_n() => {
            l.iter().map(|&n| base.clone().with_n(n)).collect()
        }
        (_, kind) => {
            return Err(LexdivError::invalid(format!(
                "{kind} cannot be swept over these parameter values"
            )))
        }
    };
    for spec in &specs {
        spec.validate()?;
        let short: Vec<&str> = corpus
            .texts()
            .iter()
            .filter(|t| t.len() < spec.min_tokens())
            .map(Text::id)
            .collect();
        if !short.is_empty() {
            return Err(LexdivError::invalid(format!(
                "{} exceeds the length of texts: {}",
                spec.param_label(),
                short.join(", ")
            )));
        }
    }
    let labels = values.labels();
    let rows: Vec<Vec<f64>> = corpus
        .texts()
        .par_iter()
        .map(|t| {
            specs
                .iter()
                .zip(&labels)
                .map(|(spec, label)| {
                    let seed = stream_seed(&[&master_seed.to_string(), t.id(), "sweep", label]);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    spec.evaluate(t.codes(), &mut rng).map(|s| s.value)
                })
                .collect::<Result<Vec<f64>>>()
                .map_err(|e| e.in_text(t.id()))
        })
        .collect::<Result<_>>()?;
    let meta = MatrixMeta {
        method: "parameter".into(),
        index: Some(base.clone()),
        seed: Some(master_seed),
        iterations: None,
        truncate_to: None,
        effective_length: None,
    };
    let ids = corpus.texts().iter().map(|t| t.id().to_string()).collect();
    Ok(ScoreMatrix::new(ids, labels, rows.concat())?.with_meta(meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::CasePolicy;

    fn text(id: &str, s: &str) -> Text {
        Text::from_whitespace(id, s, CasePolicy::Fold).unwrap()
    }

    #[test]
    fn parallel_condition_lengths() {
        let toks: Vec<u32> = (0..400).map(|i| i % 37).collect();
        let spec = IndexSpec::new(IndexKind::Ttr);
        let row = parallel_sampling(&toks, 240, &DEFAULT_DIVISORS, &spec, 1).unwrap();
        assert_eq!(row.lengths, [240, 120, 80, 60]);
        let row = parallel_sampling(&toks, 400, &DEFAULT_DIVISORS, &spec, 1).unwrap();
        assert_eq!(row.lengths, [400, 200, 133, 100]);
    }

    #[test]
    fn parallel_small_example() {
        let t = text("x", "a b a b a b a b");
        let spec = IndexSpec::new(IndexKind::Ttr);
        let row = parallel_sampling(t.codes(), 8, &[1, 2], &spec, 0).unwrap();
        assert_eq!(row.scores, [0.25, 0.5]);
    }

    #[test]
    fn parallel_rejects_short_segments() {
        let toks: Vec<u32> = (0..100).collect();
        let spec = IndexSpec::new(IndexKind::Mattr);
        let err = parallel_sampling(&toks, 100, &[1, 2, 3], &spec, 0).unwrap_err();
        assert!(matches!(err, LexdivError::Condition { ref condition, .. } if condition == "3"), "{err}");
    }

    #[test]
    fn random_ttr_of_constant_text() {
        let toks = vec![0u32; 50];
        let spec = IndexSpec::new(IndexKind::Ttr);
        let row = random_sampling(&toks, 50, &[50, 25, 10], 20, 7, &spec).unwrap();
        assert_eq!(row.scores, [1.0 / 50.0, 1.0 / 25.0, 1.0 / 10.0]);
        assert!(random_sampling(&toks, 50, &[60], 20, 7, &spec).is_err());
    }

    #[test]
    fn random_and_ordered_share_samples() {
        let toks: Vec<u32> = (0..120).map(|i| (i * 7 % 23) as u32).collect();
        let spec = IndexSpec::new(IndexKind::Hdd).with_n(10);
        let a = random_iteration_scores(&toks, 120, 40, 50, 99, &spec, SampleOrder::Shuffled).unwrap();
        let b = random_iteration_scores(&toks, 120, 40, 50, 99, &spec, SampleOrder::TextOrder).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ordered_samples_are_increasing_positions() {
        let toks: Vec<u32> = (0..303).collect();
        let mut rng = condition_rng(5, 151);
        let mut seen = 0;
        for_each_random_sample(303, 151, 3, SampleOrder::TextOrder, &mut rng, |pos, _| {
            assert!(pos.windows(2).all(|w| toks[w[0]] < toks[w[1]]));
            seen += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, 3);
    }

    #[test]
    fn alternating_small_example() {
        let t = text("x", "a a b b");
        let spec = IndexSpec::new(IndexKind::Ttr);
        let row = alternating_sampling(t.codes(), 4, &[1, 2], 25, 3, &spec).unwrap();
        assert_eq!(row.lengths, [4, 2]);
        assert_eq!(row.scores, [0.5, 1.0]);
    }

    #[test]
    fn alternating_truncates_to_common_multiple() {
        assert_eq!(alternating_effective_len(240, &[1, 2, 3, 4]).unwrap(), 240);
        assert_eq!(alternating_effective_len(281, &[1, 2, 3, 4]).unwrap(), 276);
        assert_eq!(alternating_effective_len(281, &[1, 3]).unwrap(), 279);
        assert!(alternating_effective_len(5, &[2, 3, 4]).is_err());
    }

    #[test]
    fn sweep_ranges() {
        assert_eq!(SweepValues::parse_lengths("24:240:24").unwrap().labels().len(), 10);
        assert_eq!(
            SweepValues::parse_lengths("40:400:40").unwrap(),
            SweepValues::Lengths((1..=10).map(|i| 40 * i).collect())
        );
        let f = SweepValues::parse_factors("0.66:0.75:0.01").unwrap();
        assert_eq!(f, SweepValues::default_mtld_factors());
        assert_eq!(f.labels()[0], "0.66");
        assert!(SweepValues::parse_lengths("10:5:1").is_err());
        assert!(SweepValues::parse_lengths("10:20").is_err());
    }

    #[test]
    fn sweep_rejects_long_parameters() {
        let corpus = Corpus::from_texts(vec![
            text("long", &"a b c d e f g h i j ".repeat(10)),
            text("short", "a b c d e"),
        ])
        .unwrap();
        let err = parameter_sweep(
            &corpus,
            &IndexSpec::new(IndexKind::Mattr),
            &SweepValues::Lengths(vec![2, 10]),
            1,
        )
        .unwrap_err();
        assert!(err.to_string().contains("short"), "{err}");
        let err = parameter_sweep(
            &corpus,
            &IndexSpec::new(IndexKind::Ttr),
            &SweepValues::Lengths(vec![2, 3]),
            1,
        );
        assert!(err.is_err());
    }

    #[test]
    fn stream_seed_depends_on_every_part() {
        let a = stream_seed(&["1", "t", "random"]);
        assert_ne!(a, stream_seed(&["1", "t", "parallel"]));
        assert_ne!(a, stream_seed(&["2", "t", "random"]));
        assert_ne!(stream_seed(&["ab", "c"]), stream_seed(&["a", "bc"]));
        assert_eq!(
            text_seed(1, "t", Method::Random),
            text_seed(1, "t", Method::OrderedRandom)
        );
    }
}
