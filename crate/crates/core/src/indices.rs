//! Lexical diversity indices.
//!
//! All functions take a text as a slice of type codes (see
//! [`Text::codes`](crate::corpus::Text::codes)); any `u32` labelling works as
//! long as equal tokens share a code. Global indices depend only on the
//! frequency spectrum; local ones walk contiguous segments or windows.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LexdivError, Result};
use crate::numerics::{hypergeom_presence, CompensatedSum};

/// Seed used by stochastic indices when a spec carries none.
pub const DEFAULT_INDEX_SEED: u64 = 0x5eed_1dec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    Ttr,
    GuiraudR,
    HerdanC,
    MaasA,
    Mttrrs,
    Hdd,
    Mattr,
    Msttr,
    Mttrss,
    Mtld,
}

impl IndexKind {
    pub const ALL: [IndexKind; 10] = [
        IndexKind::Ttr,
        IndexKind::GuiraudR,
        IndexKind::HerdanC,
        IndexKind::MaasA,
        IndexKind::Mttrrs,
        IndexKind::Hdd,
        IndexKind::Mattr,
        IndexKind::Msttr,
        IndexKind::Mttrss,
        IndexKind::Mtld,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IndexKind::Ttr => "ttr",
            IndexKind::GuiraudR => "guiraud_r",
            IndexKind::HerdanC => "herdan_c",
            IndexKind::MaasA => "maas_a",
            IndexKind::Mttrrs => "mttrrs",
            IndexKind::Hdd => "hdd",
            IndexKind::Mattr => "mattr",
            IndexKind::Msttr => "msttr",
            IndexKind::Mttrss => "mttrss",
            IndexKind::Mtld => "mtld",
        }
    }

    /// Depends only on the frequency spectrum.
    pub fn is_global(self) -> bool {
        matches!(
            self,
            IndexKind::Ttr | IndexKind::GuiraudR | IndexKind::HerdanC | IndexKind::MaasA | IndexKind::Hdd
        )
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, IndexKind::Mttrrs | IndexKind::Mttrss)
    }

    pub fn uses_n(self) -> bool {
        matches!(
            self,
            IndexKind::Mttrrs | IndexKind::Hdd | IndexKind::Mattr | IndexKind::Msttr | IndexKind::Mttrss
        )
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IndexKind {
    type Err = LexdivError;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ttr" => IndexKind::Ttr,
            "guiraud" | "guiraud_r" | "rttr" => IndexKind::GuiraudR,
            "herdan" | "herdan_c" => IndexKind::HerdanC,
            "maas" | "maas_a" => IndexKind::MaasA,
            "mttrrs" => IndexKind::Mttrrs,
            "hdd" | "hd_d" => IndexKind::Hdd,
            "mattr" => IndexKind::Mattr,
            "msttr" => IndexKind::Msttr,
            "mttrss" => IndexKind::Mttrss,
            "mtld" => IndexKind::Mtld,
            other => return Err(LexdivError::invalid(format!("unknown index `{other}`"))),
        };
        Ok(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaasVariant {
    /// a = √((ln N − ln V) / (ln N)²)
    #[default]
    NaturalLogA,
    /// a² = (log₁₀N − log₁₀V) / (log₁₀N)²
    Base10ASquared,
}

impl FromStr for MaasVariant {
    type Err = LexdivError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" | "natural_log_a" => Ok(MaasVariant::NaturalLogA),
            "base10-sq" | "base10_a_squared" | "base10" => Ok(MaasVariant::Base10ASquared),
            other => Err(LexdivError::invalid(format!("unknown Maas variant `{other}`"))),
        }
    }
}

/// Everything needed to score a text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexSpec {
    pub kind: IndexKind,
    /// Sample, segment or window length in tokens.
    pub n: usize,
    /// Number of samples (MTTRRS, MTTRSS).
    pub s: usize,
    /// MTLD TTR threshold.
    pub factor: f64,
    pub maas_variant: MaasVariant,
    /// MTLD: shortest segment allowed to close a full factor.
    pub mtld_min_segment: usize,
    pub seed: Option<u64>,
}

impl IndexSpec {
    /// Spec with the customary defaults: n=42 for HD-D, n=50 and s=10 for the
    /// segment-based indices, factor 0.72 for MTLD.
    pub fn new(kind: IndexKind) -> Self {
        IndexSpec {
            kind,
            n: if kind == IndexKind::Hdd { 42 } else { 50 },
            s: 10,
            factor: 0.72,
            maas_variant: MaasVariant::NaturalLogA,
            mtld_min_segment: 1,
            seed: None,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_s(mut self, s: usize) -> Self {
        self.s = s;
        self
    }

    pub fn with_factor(mut self, factor: f64) -> Self {
        self.factor = factor;
        self
    }

    pub fn with_maas_variant(mut self, variant: MaasVariant) -> Self {
        self.maas_variant = variant;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(index_error(self.kind, m));
        if self.kind.uses_n() && self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.kind.is_stochastic() && self.s == 0 {
            return bad("s must be at least 1".into());
        }
        if self.kind == IndexKind::Mtld && !(self.factor > 0.0 && self.factor < 1.0) {
            return bad(format!("factor {} outside (0, 1)", self.factor));
        }
        Ok(())
    }

    /// Shortest text this spec can score.
    pub fn min_tokens(&self) -> usize {
        match self.kind {
            IndexKind::HerdanC | IndexKind::MaasA => 2,
            IndexKind::Hdd | IndexKind::Mattr | IndexKind::Msttr | IndexKind::Mttrss => self.n,
            _ => 1,
        }
    }

    /// Parameter description used in CSV output, e.g. `n=50;s=10`.
    pub fn param_label(&self) -> String {
        match self.kind {
            IndexKind::Ttr | IndexKind::GuiraudR | IndexKind::HerdanC => String::new(),
            IndexKind::MaasA => match self.maas_variant {
                MaasVariant::NaturalLogA => "variant=natural_log_a".into(),
                MaasVariant::Base10ASquared => "variant=base10_a_squared".into(),
            },
            IndexKind::Hdd | IndexKind::Mattr | IndexKind::Msttr => format!("n={}", self.n),
            IndexKind::Mttrrs | IndexKind::Mttrss => format!("n={};s={}", self.n, self.s),
            IndexKind::Mtld if self.mtld_min_segment > 1 => {
                format!("factor={};min_segment={}", self.factor, self.mtld_min_segment)
            }
            IndexKind::Mtld => format!("factor={}", self.factor),
        }
    }

    /// Scores `tokens`, drawing any randomness from `rng`.
    pub fn evaluate<R: Rng + ?Sized>(&self, tokens: &[u32], rng: &mut R) -> Result<Score> {
        self.validate()?;
        let value = match self.kind {
            IndexKind::Ttr => ttr(tokens)?,
            IndexKind::GuiraudR => guiraud_r(tokens)?,
            IndexKind::HerdanC => herdan_c(tokens)?,
            IndexKind::MaasA => maas_a(tokens, self.maas_variant)?,
            IndexKind::Mttrrs => mttrrs(tokens, self.n, self.s, rng)?,
            IndexKind::Hdd => hdd(tokens, self.n)?,
            IndexKind::Mattr => mattr(tokens, self.n)?,
            IndexKind::Msttr => msttr(tokens, self.n)?,
            IndexKind::Mttrss => mttrss(tokens, self.n, self.s, rng)?,
            IndexKind::Mtld => {
                let m = mtld_with_min_segment(tokens, self.factor, self.mtld_min_segment)?;
                return Ok(Score {
                    value: m.value,
                    undefined_factors: m.undefined_factors,
                });
            }
        };
        Ok(Score::plain(value))
    }

    /// Scores `tokens` with an RNG seeded from `seed`, or `DEFAULT_INDEX_SEED` when unset.
    pub fn score(&self, tokens: &[u32]) -> Result<Score> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.unwrap_or(DEFAULT_INDEX_SEED));
        self.evaluate(tokens, &mut rng)
    }
}

/// An index value plus diagnostic flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub value: f64,
    /// MTLD only: no factor was completed in either direction.
    pub undefined_factors: bool,
}

impl Score {
    fn plain(value: f64) -> Self {
        Score {
            value,
            undefined_factors: false,
        }
    }

    pub fn flags(&self) -> &'static str {
        if self.undefined_factors {
            "undefined_factors"
        } else {
            ""
        }
    }
}

fn index_error(kind: IndexKind, message: impl Into<String>) -> LexdivError {
    LexdivError::Index {
        index: kind.name().to_string(),
        message: message.into(),
    }
}

/// Type frequencies of a token sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencySpectrum {
    /// Frequency per type code; codes absent from the text are dropped.
    freqs: Vec<(u32, u32)>,
    n_tokens: usize,
}

impl FrequencySpectrum {
    pub fn n_tokens(&self) -> usize {
        self.n_tokens
    }

    pub fn n_types(&self) -> usize {
        self.freqs.len()
    }

    /// (type code, frequency) pairs in code order.
    pub fn frequencies(&self) -> &[(u32, u32)] {
        &self.freqs
    }

    pub fn frequency(&self, code: u32) -> u32 {
        self.freqs
            .binary_search_by_key(&code, |&(c, _)| c)
            .map(|i| self.freqs[i].1)
            .unwrap_or(0)
    }

    /// (frequency, number of types with that frequency), ascending.
    pub fn frequency_classes(&self) -> Vec<(u32, u32)> {
        let mut fs: Vec<u32> = self.freqs.iter().map(|&(_, f)| f).collect();
        fs.sort_unstable();
        let mut classes: Vec<(u32, u32)> = Vec::new();
        for f in fs {
            match classes.last_mut() {
                Some((g, count)) if *g == f => *count += 1,
                _ => classes.push((f, 1)),
            }
        }
        classes
    }
}

pub fn spectrum(tokens: &[u32]) -> FrequencySpectrum {
    let max = tokens.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut counts = vec![0u32; max];
    for &t in tokens {
        counts[t as usize] += 1;
    }
    let freqs = counts
        .into_iter()
        .enumerate()
        .filter(|&(_, f)| f > 0)
        .map(|(c, f)| (c as u32, f))
        .collect();
    FrequencySpectrum {
        freqs,
        n_tokens: tokens.len(),
    }
}

/// Counts distinct codes over several short slices without reallocating.
struct DistinctCounter {
    stamps: Vec<u32>,
    generation: u32,
}

impl DistinctCounter {
    fn for_tokens(tokens: &[u32]) -> Self {
        let max = tokens.iter().copied().max().map_or(0, |m| m as usize + 1);
        DistinctCounter {
            stamps: vec![0; max],
            generation: 0,
        }
    }

    fn reset(&mut self) {
        self.generation += 1;
    }

    /// Marks `code`; true if it was not yet seen in this generation.
    fn insert(&mut self, code: u32) -> bool {
        let slot = &mut self.stamps[code as usize];
        if *slot == self.generation {
            false
        } else {
            *slot = self.generation;
            true
        }
    }

    fn count<I: IntoIterator<Item = u32>>(&mut self, codes: I) -> u64 {
        self.reset();
        codes.into_iter().filter(|&c| self.insert(c)).count() as u64
    }
}

fn n_types(tokens: &[u32]) -> usize {
    DistinctCounter::for_tokens(tokens).count(tokens.iter().copied()) as usize
}

fn require_nonempty(kind: IndexKind, tokens: &[u32]) -> Result<()> {
    if tokens.is_empty() {
        Err(index_error(kind, "empty text"))
    } else {
        Ok(())
    }
}

fn require_window(kind: IndexKind, tokens: &[u32], n: usize, what: &str) -> Result<()> {
    if n == 0 {
        return Err(index_error(kind, "n must be at least 1"));
    }
    if n > tokens.len() {
        return Err(index_error(
            kind,
            format!("{what} ({n}) exceeds text length ({})", tokens.len()),
        ));
    }
    Ok(())
}

/// V / N.
pub fn ttr(tokens: &[u32]) -> Result<f64> {
    require_nonempty(IndexKind::Ttr, tokens)?;
    Ok(n_types(tokens) as f64 / tokens.len() as f64)
}

/// V / √N.
pub fn guiraud_r(tokens: &[u32]) -> Result<f64> {
    require_nonempty(IndexKind::GuiraudR, tokens)?;
    Ok(n_types(tokens) as f64 / (tokens.len() as f64).sqrt())
}

/// log V / log N; 0 when V = 1.
pub fn herdan_c(tokens: &[u32]) -> Result<f64> {
    if tokens.len() < 2 {
        return Err(index_error(IndexKind::HerdanC, "undefined for single token"));
    }
    let v = n_types(tokens) as f64;
    Ok(v.ln() / (tokens.len() as f64).ln())
}

pub fn maas_a(tokens: &[u32], variant: MaasVariant) -> Result<f64> {
    if tokens.len() < 2 {
        return Err(index_error(IndexKind::MaasA, "undefined for single token"));
    }
    let n = tokens.len() as f64;
    let v = n_types(tokens) as f64;
    Ok(match variant {
        MaasVariant::NaturalLogA => ((n.ln() - v.ln()) / (n.ln() * n.ln())).sqrt(),
        MaasVariant::Base10ASquared => (n.log10() - v.log10()) / (n.log10() * n.log10()),
    })
}

/// Expected TTR of a random sample of `n` tokens drawn without replacement.
pub fn hdd(tokens: &[u32], n: usize) -> Result<f64> {
    if n > tokens.len() {
        return Err(index_error(
            IndexKind::Hdd,
            format!("sample exceeds text length ({n} > {})", tokens.len()),
        ));
    }
    require_window(IndexKind::Hdd, tokens, n, "sample")?;
    let total = tokens.len() as u64;
    // Summing by frequency class keeps the result independent of token order.
    let mut sum = CompensatedSum::new();
    for (f, count) in spectrum(tokens).frequency_classes() {
        sum.add(count as f64 * hypergeom_presence(total, f as u64, n as u64)?);
    }
    // The expected type count never exceeds n; trim rounding overshoot.
    Ok((sum.total() / n as f64).min(1.0))
}

/// Probability that two tokens drawn without replacement are of different types.
pub fn gini_simpson(tokens: &[u32]) -> Result<f64> {
    if tokens.len() < 2 {
        return Err(LexdivError::invalid("gini_simpson needs at least 2 tokens"));
    }
    let n = tokens.len() as u64;
    let same: u64 = spectrum(tokens)
        .frequencies()
        .iter()
        .map(|&(_, f)| f as u64 * (f as u64 - 1))
        .sum();
    Ok(1.0 - same as f64 / (n * (n - 1)) as f64)
}

/// Mean number of types in `s` samples of `n` tokens drawn with replacement, over n.
pub fn mttrrs<R: Rng + ?Sized>(tokens: &[u32], n: usize, s: usize, rng: &mut R) -> Result<f64> {
    require_nonempty(IndexKind::Mttrrs, tokens)?;
    if n == 0 || s == 0 {
        return Err(index_error(IndexKind::Mttrrs, "n and s must be at least 1"));
    }
    let mut counter = DistinctCounter::for_tokens(tokens);
    let mut total = 0u64;
    for _ in 0..s {
        total += counter.count((0..n).map(|_| tokens[rng.random_range(0..tokens.len())]));
    }
    Ok(total as f64 / (n * s) as f64)
}

/// Mean TTR over every window of `n` consecutive tokens.
pub fn mattr(tokens: &[u32], n: usize) -> Result<f64> {
    require_window(IndexKind::Mattr, tokens, n, "window")?;
    let max = tokens.iter().copied().max().map_or(0, |m| m as usize + 1);
    let mut counts = vec![0u32; max];
    let mut distinct = 0u64;
    for &t in &tokens[..n] {
        if counts[t as usize] == 0 {
            distinct += 1;
        }
        counts[t as usize] += 1;
    }
    let mut total = distinct;
    for i in n..tokens.len() {
        let out = tokens[i - n] as usize;
        counts[out] -= 1;
        if counts[out] == 0 {
            distinct -= 1;
        }
        let inc = tokens[i] as usize;
        if counts[inc] == 0 {
            distinct += 1;
        }
        counts[inc] += 1;
        total += distinct;
    }
    let windows = (tokens.len() - n + 1) as f64;
    Ok(total as f64 / (n as f64 * windows))
}

/// Mean TTR over the complete consecutive segments of `n` tokens.
pub fn msttr(tokens: &[u32], n: usize) -> Result<f64> {
    if n > tokens.len() {
        return Err(index_error(
            IndexKind::Msttr,
            format!("no complete segment ({n} > {})", tokens.len()),
        ));
    }
    require_window(IndexKind::Msttr, tokens, n, "segment")?;
    let mut counter = DistinctCounter::for_tokens(tokens);
    let segments = tokens.len() / n;
    let total: u64 = tokens
        .chunks_exact(n)
        .map(|seg| counter.count(seg.iter().copied()))
        .sum();
    Ok(total as f64 / (n * segments) as f64)
}

/// Mean TTR of `s` segments of `n` contiguous tokens with uniformly drawn starts.
pub fn mttrss<R: Rng + ?Sized>(tokens: &[u32], n: usize, s: usize, rng: &mut R) -> Result<f64> {
    require_window(IndexKind::Mttrss, tokens, n, "segment")?;
    if s == 0 {
        return Err(index_error(IndexKind::Mttrss, "s must be at least 1"));
    }
    let starts = tokens.len() - n + 1;
    let mut counter = DistinctCounter::for_tokens(tokens);
    let mut total = 0u64;
    for _ in 0..s {
        let start = rng.random_range(0..starts);
        total += counter.count(tokens[start..start + n].iter().copied());
    }
    Ok(total as f64 / (n * s) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MtldScore {
    pub value: f64,
    pub undefined_factors: bool,
}

/// Factor count for one directional pass.
fn mtld_factors<I: Iterator<Item = u32>>(
    tokens: I,
    counter: &mut DistinctCounter,
    factor: f64,
    min_segment: usize,
) -> f64 {
    counter.reset();
    let mut factors = 0.0;
    let mut len = 0usize;
    let mut types = 0usize;
    for t in tokens {
        len += 1;
        if counter.insert(t) {
            types += 1;
        }
        if (types as f64 / len as f64) < factor && len >= min_segment {
            factors += 1.0;
            len = 0;
            types = 0;
            counter.reset();
        }
    }
    if len > 0 {
        factors += (1.0 - types as f64 / len as f64) / (1.0 - factor);
    }
    factors
}

/// Bidirectional MTLD with the usual one-token segment growth.
pub fn mtld(tokens: &[u32], factor: f64) -> Result<MtldScore> {
    mtld_with_min_segment(tokens, factor, 1)
}

/// MTLD where a segment must hold at least `min_segment` tokens before it
/// can close a full factor.
pub fn mtld_with_min_segment(tokens: &[u32], factor: f64, min_segment: usize) -> Result<MtldScore> {
    require_nonempty(IndexKind::Mtld, tokens)?;
    if !(factor > 0.0 && factor < 1.0) {
        return Err(index_error(IndexKind::Mtld, format!("factor {factor} outside (0, 1)")));
    }
    let mut counter = DistinctCounter::for_tokens(tokens);
    let n = tokens.len() as f64;
    let forward = mtld_factors(tokens.iter().copied(), &mut counter, factor, min_segment);
    let backward = mtld_factors(tokens.iter().rev().copied(), &mut counter, factor, min_segment);
    let passes: Vec<f64> = [forward, backward]
        .into_iter()
        .filter(|&f| f > 0.0)
        .map(|f| n / f)
        .collect();
    Ok(match passes.as_slice() {
        [] => MtldScore {
            value: n,
            undefined_factors: true,
        },
        [one] => MtldScore {
            value: *one,
            undefined_factors: false,
        },
        [a, b] => MtldScore {
            value: (a + b) / 2.0,
            undefined_factors: false,
        },
        _ => unreachable!(),
    })
}

/// Weight each token position (1-based) receives in an index computed over a
/// text of `n_tokens` tokens with parameter `n`.
///
/// MATTR gives window-membership counts, MTTRSS selection probabilities,
/// MSTTR 1 inside complete segments and 0 in the dropped tail, TTR 1/N.
pub fn token_weights(kind: IndexKind, n_tokens: usize, n: usize) -> Result<Vec<f64>> {
    if n_tokens == 0 {
        return Err(index_error(kind, "text length must be at least 1"));
    }
    let needs_n = matches!(kind, IndexKind::Mattr | IndexKind::Mttrss | IndexKind::Msttr);
    if needs_n && (n == 0 || n > n_tokens) {
        return Err(index_error(kind, format!("n={n} must be in 1..={n_tokens}")));
    }
    let window = |i: usize| i.min(n).min(n_tokens - n + 1).min(n_tokens - i + 1) as f64;
    let weights = match kind {
        IndexKind::Ttr => vec![1.0 / n_tokens as f64; n_tokens],
        IndexKind::Mattr => (1..=n_tokens).map(window).collect(),
        IndexKind::Mttrss => {
            let starts = (n_tokens - n + 1) as f64;
            (1..=n_tokens).map(|i| window(i) / starts).collect()
        }
        IndexKind::Msttr => {
            let covered = n_tokens / n * n;
            (1..=n_tokens)
                .map(|i| if i <= covered { 1.0 } else { 0.0 })
                .collect()
        }
        other => {
            return Err(index_error(other, "token weights are defined for ttr, mattr, msttr and mttrss"))
        }
    };
    Ok(weights)
}
