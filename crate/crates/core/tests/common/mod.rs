//! Fixtures shared by the integration tests. Reference numbers were produced
//! by the scripts in `tests/oracles/` and frozen here.
#![allow(dead_code)]

use std::path::PathBuf;

use lexdiv::corpus::{CasePolicy, Corpus, Text};
use lexdiv::ScoreMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn load_text(id: &str, rel: &str) -> Text {
    let s = std::fs::read_to_string(data_dir().join(rel)).unwrap();
    Text::from_whitespace(id, &s, CasePolicy::Fold).unwrap()
}

/// 165-token, 100-type reference text.
pub fn alice() -> Text {
    load_text("alice", "alice/alice.txt")
}

/// 281-token sample text.
pub fn taaled_sample() -> Text {
    load_text("sample", "taaled/sample.txt")
}

pub fn matrix(rows: &[&[f64]]) -> ScoreMatrix {
    ScoreMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

pub const ICC_FIXTURE: [[f64; 4]; 6] = [
    [9.0, 2.0, 5.0, 8.0],
    [6.0, 1.0, 3.0, 2.0],
    [8.0, 4.0, 6.0, 8.0],
    [7.0, 1.0, 2.0, 6.0],
    [10.0, 5.0, 6.0, 9.0],
    [6.0, 2.0, 4.0, 7.0],
];

pub const ANOVA_FIXTURE: [[f64; 3]; 8] = [
    [0.71, 0.69, 0.66],
    [0.80, 0.78, 0.79],
    [0.62, 0.65, 0.58],
    [0.75, 0.70, 0.69],
    [0.90, 0.86, 0.85],
    [0.68, 0.66, 0.67],
    [0.77, 0.71, 0.70],
    [0.83, 0.84, 0.80],
];

pub fn icc_fixture() -> ScoreMatrix {
    ScoreMatrix::from_rows(&ICC_FIXTURE.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

pub fn anova_fixture() -> ScoreMatrix {
    ScoreMatrix::from_rows(&ANOVA_FIXTURE.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

/// (estimate, ci_low, ci_high)
pub const ICC6X4_AGREEMENT: (f64, f64, f64) = (0.2897637795275592, 0.018786513374712044, 0.7610843696489529);
pub const ICC6X4_CONSISTENCY: (f64, f64, f64) = (0.7148407148407154, 0.342464765033926, 0.9458582599553597);
pub const ICC6X4_MS: (f64, f64, f64) = (11.241666666666669, 32.486111111111114, 1.019444444444442);
pub const ICC8X3_AGREEMENT: (f64, f64, f64) = (0.9086161879895556, 0.6137588197709556, 0.9810182382814552);
pub const ICC8X3_CONSISTENCY: (f64, f64, f64) = (0.9524269500120739, 0.850491269584918, 0.9893858559055074);

/// (F, p, partial eta squared)
pub const ANOVA6X4: (f64, f64, f64) = (31.86648501362401, 9.454263202470541e-07, 0.8643754619364377);
pub const ANOVA8X3: (f64, f64, f64) = (9.108291032148792, 0.0029264425825309857, 0.5654411764705853);

/// (r_jk, r_jh, r_kh, n)
pub type Triple = (f64, f64, f64, usize);
/// (t, p) and (zou_low, zou_high)
pub type Pair = (f64, f64);

/// ((r_jk, r_jh, r_kh, n), (t, p), (zou_low, zou_high))
pub const CORR_TRIPLES: [(Triple, Pair, Pair); 3] = [
    (
        (0.342, 0.285, 0.88, 188),
        (1.684814364799427, 0.09371058039753917),
        (-0.009879011144823008, 0.12507206709155014),
    ),
    (
        (0.515, 0.480, 0.93, 223),
        (1.618261101865456, 0.10703909766318402),
        (-0.008324362427482558, 0.08077705682321165),
    ),
    (
        (0.45, 0.21, 0.35, 60),
        (1.764875972979357, 0.08294168506596457),
        (-0.030270774178506737, 0.5049100903533577),
    ),
];

pub const PEARSON_X: [f64; 7] = [2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 2.8];
pub const PEARSON_Y: [f64; 7] = [1.0, 2.2, 1.4, 4.1, 3.9, 2.0, 2.9];
pub const PEARSON_R: f64 = 0.8984404400159341;

/// Two-sided p of t = 3.18 on 185 df.
pub const T318_P: f64 = 0.0017269569361948484;

/// Tokens drawn from a Zipf law with exponent `s` over `vocab` types.
pub fn zipf_tokens(rng: &mut ChaCha8Rng, len: usize, vocab: usize, s: f64) -> Vec<String> {
    let w: Vec<f64> = (1..=vocab).map(|r| (r as f64).powf(-s)).collect();
    let dist = WeightedIndex::new(&w).unwrap();
    (0..len).map(|_| format!("w{}", dist.sample(rng))).collect()
}

/// Texts of varying length whose Zipf exponents are drawn from [0.95, 1.05].
/// That range puts mean MATTR(50) near 0.78 with a between-text SD near
/// 0.03, the scale seen in learner essay corpora.
pub fn zipf_corpus(n_texts: usize, min_len: usize, max_len: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let texts = (0..n_texts)
        .map(|i| {
            let len = rng.random_range(min_len..=max_len);
            let s = rng.random_range(0.95..1.05);
            let toks = zipf_tokens(&mut rng, len, 4000, s);
            Text::new(format!("z{i:03}"), toks).unwrap()
        })
        .collect();
    Corpus::from_texts(texts).unwrap()
}

/// Random code sequences over a small alphabet.
pub fn random_codes(rng: &mut ChaCha8Rng, max_len: usize, min_len: usize) -> Vec<u32> {
    let len = rng.random_range(min_len..=max_len);
    let alphabet = rng.random_range(1..=len.max(1) as u32);
    (0..len).map(|_| rng.random_range(0..alphabet)).collect()
}
