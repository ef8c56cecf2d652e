//! End-to-end runs: corpus → score matrices → ICC/ANOVA reports and profiles.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{Experiment, RunConfig};
use crate::corpus::{load_corpus, Corpus, Loaded};
use crate::error::{LexdivError, Result};
use crate::indices::IndexSpec;
use crate::matrix::{MatrixMeta, ScoreMatrix};
use crate::output::OutputSet;
use crate::profiles::{center_columns, select_profiles, PlotData, ProfileTrace};
use crate::sampling::{parameter_sweep, run_method, SamplingConfig};
use crate::stats::{compare_correlations, icc_2_1, rm_anova, AnovaResult, CorrComparison, IccMode, IccResult};

/// Metadata written next to every output file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sidecar {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub matrix: MatrixMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile_trace: Option<Vec<ProfileTrace>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Sidecar {
    pub fn new(config: &RunConfig, matrix: &MatrixMeta) -> Self {
        Sidecar {
            tool: "lexdiv".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            matrix: matrix.clone(),
            profile_trace: None,
            warnings: Vec::new(),
        }
    }
}

/// Either a statistic or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome<T> {
    Ok(T),
    Error(String),
}

impl<T> From<Result<T>> for Outcome<T> {
    fn from(r: Result<T>) -> Self {
        match r {
            Ok(v) => Outcome::Ok(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    }
}

impl<T> Outcome<T> {
    pub fn ok(&self) -> Option<&T> {
        match self {
            Outcome::Ok(v) => Some(v),
            Outcome::Error(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub method: String,
    pub index: IndexSpec,
    pub n_texts: usize,
    pub conditions: Vec<String>,
    pub icc_agreement: Outcome<IccResult>,
    pub icc_consistency: Outcome<IccResult>,
    pub anova: Outcome<AnovaResult>,
    /// Criterion correlation at the first condition against the last one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<Outcome<CorrComparison>>,
}

impl MatrixReport {
    pub fn new(m: &ScoreMatrix, index: &IndexSpec) -> Self {
        MatrixReport {
            method: m.meta.method.clone(),
            index: index.clone(),
            n_texts: m.n_rows(),
            conditions: m.col_labels().to_vec(),
            icc_agreement: icc_2_1(m, IccMode::Agreement).into(),
            icc_consistency: icc_2_1(m, IccMode::Consistency).into(),
            anova: rm_anova(m).into(),
            criterion: None,
        }
    }

    /// Adds the criterion comparison when any text carries a score.
    pub fn with_criterion(mut self, m: &ScoreMatrix, corpus: &Corpus) -> Self {
        let (mut x, mut first, mut last) = (Vec::new(), Vec::new(), Vec::new());
        for (i, id) in m.row_ids().iter().enumerate() {
            if let Some(score) = corpus.get(id).and_then(|t| t.score()) {
                x.push(score);
                first.push(m.get(i, 0));
                last.push(m.get(i, m.n_cols() - 1));
            }
        }
        if !x.is_empty() {
            self.criterion = Some(compare_correlations(&x, &first, &last).into());
        }
        self
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub files: Vec<PathBuf>,
    pub reports: Vec<MatrixReport>,
    pub warnings: Vec<String>,
}

/// File stems per index; repeated kinds get their position appended.
fn index_stems(specs: &[IndexSpec]) -> Vec<String> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for s in specs {
        *seen.entry(s.kind.name()).or_default() += 1;
    }
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if seen[s.kind.name()] > 1 {
                format!("{}_{i}", s.kind.name())
            } else {
                s.kind.name().to_string()
            }
        })
        .collect()
}

fn write_matrix_outputs(
    out: &mut OutputSet,
    dir: &Path,
    stem: &str,
    config: &RunConfig,
    m: &ScoreMatrix,
    report: &MatrixReport,
    profile_source: &ScoreMatrix,
) -> Result<()> {
    let meta = Sidecar::new(config, &m.meta);
    out.write_matrix(&dir.join(format!("{stem}.csv")), m, &meta)?;
    out.write_json(&dir.join(format!("{stem}_icc.json")), report)?;
    let selection = select_profiles(profile_source, config.profiles)?;
    let plot = PlotData::from_selection(profile_source, &selection)?;
    let mut bytes = Vec::new();
    plot.write_csv(&mut bytes)?;
    let mut pmeta = meta;
    pmeta.profile_trace = Some(selection.trace);
    pmeta.warnings = selection.warnings;
    out.write_with_meta(&dir.join(format!("{stem}_profiles.csv")), &bytes, &pmeta)
}

/// Runs the configured experiment on an already loaded corpus, writing into
/// `config.out_dir`. Nothing is left behind if any step fails.
pub fn run_experiment_on(corpus: &Corpus, config: &RunConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| LexdivError::io(dir, e))?;
    let specs = config.index_specs();
    let stems = index_stems(&specs);
    let mut out = OutputSet::new();
    let mut reports = Vec::new();
    match config.experiment {
        Experiment::Length => {
            let truncate_to = config.truncate_to.unwrap_or_else(|| corpus.min_text_len());
            for &method in &config.methods {
                let sc = SamplingConfig::new(method, truncate_to)
                    .with_conditions(config.conditions())
                    .with_iterations(config.iterations)
                    .with_seed(config.seed);
                for (spec, stem) in specs.iter().zip(&stems) {
                    log::info!("{method} / {}", spec.kind);
                    let m = run_method(corpus, &sc, spec)?;
                    let report = MatrixReport::new(&m, spec).with_criterion(&m, corpus);
                    write_matrix_outputs(&mut out, dir, &format!("{method}_{stem}"), config, &m, &report, &m)?;
                    reports.push(report);
                }
            }
        }
        Experiment::Parameter => {
            for (spec, stem) in specs.iter().zip(&stems) {
                let values = config.sweep_values(spec.kind)?;
                log::info!("parameter / {}", spec.kind);
                let m = parameter_sweep(corpus, spec, &values, config.seed)?;
                let report = MatrixReport::new(&m, spec).with_criterion(&m, corpus);
                let centered = center_columns(&m);
                write_matrix_outputs(
                    &mut out,
                    dir,
                    &format!("parameter_{stem}"),
                    config,
                    &m,
                    &report,
                    &centered,
                )?;
                reports.push(report);
            }
        }
    }
    Ok(ExperimentReport {
        files: out.commit(),
        reports,
        warnings: Vec::new(),
    })
}

/// Loads `config.corpus` and runs the experiment.
pub fn run_experiment(config: &RunConfig) -> Result<ExperimentReport> {
    let dir = config
        .corpus
        .as_ref()
        .ok_or_else(|| LexdivError::Config("no corpus directory configured".into()))?;
    let loaded = load_corpus_with_scores(dir, config)?;
    let mut report = run_experiment_on(&loaded.corpus, config)?;
    report.warnings = loaded.warnings;
    Ok(report)
}

/// Loads a corpus and attaches `config.scores` if set; score rows naming no
/// loaded text become warnings.
pub fn load_corpus_with_scores(dir: &Path, config: &RunConfig) -> Result<Loaded> {
    let mut loaded = load_corpus(dir, config.case, config.min_length)?;
    if let Some(path) = &config.scores {
        for id in loaded.corpus.attach_scores(path)? {
            let w = format!("{}: no text with id `{id}`", path.display());
            log::warn!("{w}");
            loaded.warnings.push(w);
        }
    }
    Ok(loaded)
}

/// One row of an index table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexRow {
    pub text_id: String,
    pub index: String,
    pub param: String,
    pub score: f64,
    pub flags: String,
}

/// Scores every text with every spec. Stochastic indices draw from a
/// per-text stream derived from `master_seed`.
pub fn index_table(corpus: &Corpus, specs: &[IndexSpec], master_seed: u64) -> Result<Vec<IndexRow>> {
    use rand_chacha::rand_core::SeedableRng;
    use rayon::prelude::*;

    for spec in specs {
        spec.validate()?;
    }
    let rows: Vec<Vec<IndexRow>> = corpus
        .texts()
        .par_iter()
        .map(|t| {
            specs
                .iter()
                .map(|spec| {
                    let seed = crate::sampling::stream_seed(&[
                        &master_seed.to_string(),
                        t.id(),
                        "index",
                        spec.kind.name(),
                    ]);
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                    let s = spec.evaluate(t.codes(), &mut rng)?;
                    Ok(IndexRow {
                        text_id: t.id().to_string(),
                        index: spec.kind.name().to_string(),
                        param: spec.param_label(),
                        score: s.value,
                        flags: s.flags().to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()
                .map_err(|e| e.in_text(t.id()))
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

/// `text_id,index,param,score,flags`.
pub fn index_table_csv(rows: &[IndexRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| LexdivError::invalid(format!("csv write failed: {e}"));
    w.write_record(["text_id", "index", "param", "score", "flags"]).map_err(err)?;
    for r in rows {
        w.write_record([&r.text_id, &r.index, &r.param, &r.score.to_string(), &r.flags])
            .map_err(err)?;
    }
    w.into_inner()
        .map_err(|e| LexdivError::invalid(format!("csv write failed: {e}")))
}
