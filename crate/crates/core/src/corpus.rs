//! Tokenized texts and corpus loading.
//!
//! A corpus directory holds one pre-tokenized UTF-8 file per text; the file
//! stem is the text id and tokens are separated by whitespace.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LexdivError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CasePolicy {
    #[default]
    Fold,
    Preserve,
}

impl std::str::FromStr for CasePolicy {
    type Err = LexdivError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fold" => Ok(CasePolicy::Fold),
            "preserve" => Ok(CasePolicy::Preserve),
            other => Err(LexdivError::invalid(format!(
                "unknown case policy `{other}` (expected fold|preserve)"
            ))),
        }
    }
}

/// An ordered token sequence with an id and an optional quality score.
///
/// Tokens are also kept as dense type codes (0..V in order of first
/// occurrence) so that index computations never hash strings.
#[derive(Debug, Clone, PartialEq)]
pub struct Text {
    id: String,
    tokens: Vec<String>,
    codes: Vec<u32>,
    n_types: usize,
    score: Option<f64>,
}

impl Text {
    pub fn new(id: impl Into<String>, tokens: Vec<String>) -> Result<Self> {
        let id = id.into();
        if tokens.is_empty() {
            return Err(LexdivError::invalid(format!("text `{id}` has no tokens")));
        }
        if tokens.iter().any(|t| t.is_empty()) {
            return Err(LexdivError::invalid(format!("text `{id}` has an empty token")));
        }
        let mut table: HashMap<&str, u32> = HashMap::new();
        let codes = tokens
            .iter()
            .map(|t| {
                let next = table.len() as u32;
                *table.entry(t.as_str()).or_insert(next)
            })
            .collect();
        let n_types = table.len();
        Ok(Text {
            id,
            tokens,
            codes,
            n_types,
            score: None,
        })
    }

    /// Splits `content` on Unicode whitespace, folding case if asked.
    pub fn from_whitespace(id: impl Into<String>, content: &str, case: CasePolicy) -> Result<Self> {
        let tokens = content
            .split_whitespace()
            .map(|t| match case {
                CasePolicy::Fold => t.to_lowercase(),
                CasePolicy::Preserve => t.to_string(),
            })
            .collect();
        Text::new(id, tokens)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Per-position type codes.
    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    /// Number of tokens, N.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Number of types, V.
    pub fn n_types(&self) -> usize {
        self.n_types
    }

    pub fn score(&self) -> Option<f64> {
        self.score
    }

    pub fn set_score(&mut self, score: Option<f64>) {
        self.score = score;
    }

    /// First `len` tokens, same id and score.
    pub fn truncate(&self, len: usize) -> Result<Text> {
        if len == 0 {
            return Err(LexdivError::invalid("truncation length must be at least 1"));
        }
        if len > self.len() {
            return Err(LexdivError::TooShort {
                len: self.len(),
                requested: len,
            });
        }
        let mut t = Text::new(self.id.clone(), self.tokens[..len].to_vec())?;
        t.score = self.score;
        Ok(t)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    texts: Vec<Text>,
    case_policy: CasePolicy,
    min_length: usize,
}

/// Result of loading a directory: the corpus plus any non-fatal warnings.
#[derive(Debug)]
pub struct Loaded {
    pub corpus: Corpus,
    pub warnings: Vec<String>,
}

impl Corpus {
    /// Builds a corpus from already constructed texts. Ids must be unique.
    pub fn from_texts(texts: Vec<Text>) -> Result<Self> {
        let mut seen = HashSet::new();
        for t in &texts {
            if !seen.insert(t.id()) {
                return Err(LexdivError::DuplicateId(t.id().to_string()));
            }
        }
        Ok(Corpus {
            texts,
            case_policy: CasePolicy::Preserve,
            min_length: 0,
        })
    }

    pub fn texts(&self) -> &[Text] {
        &self.texts
    }

    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.texts.is_empty()
    }

    pub fn case_policy(&self) -> CasePolicy {
        self.case_policy
    }

    pub fn min_length(&self) -> usize {
        self.min_length
    }

    pub fn get(&self, id: &str) -> Option<&Text> {
        self.texts.iter().find(|t| t.id() == id)
    }

    /// Shortest text length, or 0 for an empty corpus.
    pub fn min_text_len(&self) -> usize {
        self.texts.iter().map(Text::len).min().unwrap_or(0)
    }

    /// Reads `id,score` rows and attaches scores to matching texts.
    /// Returns the ids of rows that matched no text.
    pub fn attach_scores(&mut self, csv_path: &Path) -> Result<Vec<String>> {
        let file = fs::File::open(csv_path).map_err(|e| LexdivError::io(csv_path, e))?;
        let csv_err = |line: u64, message: String| LexdivError::Csv {
            path: csv_path.to_path_buf(),
            line,
            message,
        };
        let mut reader = csv::ReaderBuilder::new()
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(file);
        let headers = reader
            .headers()
            .map_err(|e| csv_err(1, e.to_string()))?
            .clone();
        if headers.len() != 2 || &headers[0] != "id" || &headers[1] != "score" {
            return Err(csv_err(1, "expected header `id,score`".into()));
        }
        let mut scores: Vec<(String, f64)> = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                csv_err(line, e.to_string())
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != 2 {
                return Err(csv_err(
                    line,
                    format!("expected 2 fields, found {}", record.len()),
                ));
            }
            let value: f64 = record[1]
                .parse()
                .map_err(|_| csv_err(line, format!("non-numeric score `{}`", &record[1])))?;
            if !value.is_finite() {
                return Err(csv_err(line, format!("non-finite score `{}`", &record[1])));
            }
            scores.push((record[0].to_string(), value));
        }
        let mut unmatched = Vec::new();
        for (id, value) in scores {
            match self.texts.iter_mut().find(|t| t.id == id) {
                Some(t) => t.score = Some(value),
                None => unmatched.push(id),
            }
        }
        Ok(unmatched)
    }
}

fn token_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| LexdivError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| LexdivError::io(dir, e))?;
        let path = entry.path();
        let hidden = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with('.'));
        if path.is_file() && !hidden {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Loads every token file in `dir`.
///
/// Empty files and texts shorter than `min_length` are dropped with a
/// warning; unreadable files and duplicate ids are errors.
pub fn load_corpus(dir: &Path, case_policy: CasePolicy, min_length: usize) -> Result<Loaded> {
    let files = token_files(dir)?;
    if files.is_empty() {
        return Err(LexdivError::EmptyDirectory(dir.to_path_buf()));
    }

    let mut seen = HashSet::new();
    for path in &files {
        let id = file_id(path);
        if !seen.insert(id.clone()) {
            return Err(LexdivError::DuplicateId(id));
        }
    }

    let parsed: Vec<Result<Option<Text>>> = files
        .par_iter()
        .map(|path| {
            let content = fs::read_to_string(path).map_err(|e| LexdivError::io(path, e))?;
            if content.split_whitespace().next().is_none() {
                return Ok(None);
            }
            Text::from_whitespace(file_id(path), &content, case_policy).map(Some)
        })
        .collect();

    let mut texts = Vec::with_capacity(files.len());
    let mut warnings = Vec::new();
    for (path, item) in files.iter().zip(parsed) {
        match item? {
            None => warnings.push(format!("{}: empty file excluded", path.display())),
            Some(t) if t.len() < min_length => warnings.push(format!(
                "{}: {} tokens < minimum length {min_length}, excluded",
                path.display(),
                t.len()
            )),
            Some(t) => texts.push(t),
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(Loaded {
        corpus: Corpus {
            texts,
            case_policy,
            min_length,
        },
        warnings,
    })
}

fn file_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}
