//! Lexical diversity indices for tokenized texts, and tools for measuring how
//! strongly an index depends on text length.
//!
//! Texts are interned to integer type codes on load; every index takes the
//! code slice. Stochastic procedures draw from seeded ChaCha streams keyed by
//! text id and condition, so results are reproducible and independent of the
//! number of worker threads.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod corpus;
pub mod error;
pub mod experiment;
pub mod indices;
pub mod matrix;
pub mod numerics;
pub mod output;
pub mod profiles;
pub mod sampling;
pub mod stats;

pub use corpus::{load_corpus, CasePolicy, Corpus, Text};
pub use error::{LexdivError, Result};
pub use indices::{IndexKind, IndexSpec, MaasVariant, Score};
pub use matrix::{MatrixMeta, ScoreMatrix};
pub use sampling::{Method, SamplingConfig};
pub use stats::{IccMode, IccResult};

/// Master seed used when none is given.
pub const DEFAULT_SEED: u64 = 2023;
