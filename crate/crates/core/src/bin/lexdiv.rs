use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lexdiv::config::{Experiment, IndexEntry, RunConfig};
use lexdiv::experiment::{index_table, index_table_csv, load_corpus_with_scores, run_experiment};
use lexdiv::indices::token_weights;
use lexdiv::output::{to_json, OutputSet};
use lexdiv::profiles::{center_columns, hdd_presence_curves, select_profiles, PlotData, PlotFormat};
use lexdiv::sampling::Method;
use lexdiv::stats::{compare_correlations, icc_2_1, rm_anova, steiger_t, zou_ci, IccMode};
use lexdiv::{CasePolicy, IndexKind, MaasVariant, ScoreMatrix};

#[derive(Parser, Debug)]
#[command(name = "lexdiv", version, about = "Lexical diversity indices and length-sensitivity evaluation")]
struct Cli {
    /// TOML run configuration; explicit flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Master seed.
    #[arg(long, global = true, env = "LEXDIV_SEED")]
    seed: Option<u64>,

    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score every text of a corpus.
    Index(IndexCmd),
    /// Score a corpus under the length-evaluation methods.
    EvaluateLength(LengthCmd),
    /// Score a corpus over a range of index parameter values.
    EvaluateParameter(ParameterCmd),
    /// Agreement and inference statistics on a scores CSV.
    #[command(subcommand)]
    Stats(StatsCmd),
    /// Select the texts with the most extreme profile changes.
    Profiles(ProfilesCmd),
    /// Presence probability curves of types by frequency and sample size.
    HddCurve(CurveCmd),
    /// Per-position token weights of a windowed index.
    Weights(WeightsCmd),
}

#[derive(Args, Debug, Clone)]
struct CorpusArgs {
    /// Directory of whitespace-tokenized text files.
    #[arg(long)]
    corpus: Option<PathBuf>,

    #[arg(long, value_enum)]
    case: Option<CaseArg>,

    /// Drop texts shorter than this many tokens.
    #[arg(long)]
    min_length: Option<usize>,

    /// `id,score` CSV of criterion scores (for example proficiency ratings).
    #[arg(long)]
    scores: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CaseArg {
    Fold,
    Preserve,
}

impl From<CaseArg> for CasePolicy {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Fold => CasePolicy::Fold,
            CaseArg::Preserve => CasePolicy::Preserve,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct IndexArgs {
    /// Index name; repeat or separate with commas. Defaults to all ten.
    #[arg(long = "index", value_delimiter = ',')]
    indices: Vec<String>,

    /// Window, segment or sample length.
    #[arg(long)]
    n: Option<usize>,

    /// Number of samples for MTTRRS and MTTRSS.
    #[arg(long)]
    s: Option<usize>,

    /// MTLD factor.
    #[arg(long)]
    factor: Option<f64>,

    /// Maas variant: natural or base10-sq.
    #[arg(long)]
    maas_variant: Option<String>,

    /// Shortest MTLD segment that may complete a factor.
    #[arg(long)]
    mtld_min_segment: Option<usize>,
}

impl IndexArgs {
    fn explicit(&self) -> bool {
        !self.indices.is_empty()
            || self.n.is_some()
            || self.s.is_some()
            || self.factor.is_some()
            || self.maas_variant.is_some()
            || self.mtld_min_segment.is_some()
    }

    /// Entries for the named indices, or `base` when none were named, with
    /// parameter flags applied to the indices that use them.
    fn entries(&self, base: &[IndexEntry]) -> Result<Vec<IndexEntry>> {
        let mut entries = if self.indices.is_empty() {
            base.to_vec()
        } else {
            self.indices
                .iter()
                .map(|s| Ok(IndexEntry::new(s.parse::<IndexKind>()?)))
                .collect::<Result<Vec<_>>>()?
        };
        let variant = self
            .maas_variant
            .as_deref()
            .map(str::parse::<MaasVariant>)
            .transpose()?;
        for e in &mut entries {
            if e.kind.uses_n() && self.n.is_some() {
                e.n = self.n;
            }
            if e.kind.is_stochastic() && self.s.is_some() {
                e.s = self.s;
            }
            if e.kind == IndexKind::Mtld {
                e.factor = self.factor.or(e.factor);
                e.mtld_min_segment = self.mtld_min_segment.or(e.mtld_min_segment);
            }
            if e.kind == IndexKind::MaasA {
                e.maas_variant = variant.or(e.maas_variant);
            }
        }
        Ok(entries)
    }
}

#[derive(Args, Debug)]
struct IndexCmd {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    index: IndexArgs,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: TableFormat,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct LengthCmd {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    index: IndexArgs,
    /// Evaluation method; repeat or separate with commas. Defaults to all four.
    #[arg(long = "method", value_delimiter = ',')]
    methods: Vec<String>,
    /// Truncation length; defaults to the shortest text.
    #[arg(long)]
    truncate: Option<usize>,
    /// Length divisors (k values for alternating sampling).
    #[arg(long, value_delimiter = ',')]
    divisors: Option<Vec<usize>>,
    /// Explicit sample lengths for random and ordered random sampling.
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<usize>>,
    /// Iterations per condition for the stochastic methods.
    #[arg(long, visible_alias = "iters")]
    iterations: Option<usize>,
    /// Number of profiles to select per matrix.
    #[arg(long)]
    profiles: Option<usize>,
    /// Directory for score CSVs, reports and sidecars.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ParameterCmd {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    index: IndexArgs,
    /// start:end:step of window lengths, or MTLD factors.
    #[arg(long, visible_alias = "params")]
    range: Option<String>,
    /// Number of profiles to select per matrix.
    #[arg(long)]
    profiles: Option<usize>,
    /// Directory for score CSVs, reports and sidecars.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum StatsCmd {
    /// ICC(2,1) of a scores CSV.
    Icc {
        /// Long-form scores CSV.
        #[arg(long)]
        from: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        mode: IccModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeated-measures ANOVA over the conditions of a scores CSV.
    Anova {
        /// Long-form scores CSV.
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two dependent correlations with Williams' t and Zou's interval.
    CompareCorr(CompareCmd),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum IccModeArg {
    Agreement,
    Consistency,
    Both,
}

#[derive(Args, Debug)]
struct CompareCmd {
    /// Scores CSV; correlations are computed against the text criterion.
    #[arg(long, requires_all = ["criterion", "large", "small"], conflicts_with_all = ["r_jk", "r_jh", "r_kh", "n"])]
    from: Option<PathBuf>,
    /// `text_id,score` CSV of the external criterion.
    #[arg(long)]
    criterion: Option<PathBuf>,
    /// Condition label of the longer texts.
    #[arg(long)]
    large: Option<String>,
    /// Condition label of the shorter texts.
    #[arg(long)]
    small: Option<String>,
    #[arg(long, requires_all = ["r_jh", "r_kh", "n"], allow_hyphen_values = true)]
    r_jk: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    r_jh: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    r_kh: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ProfilesCmd {
    /// Long-form scores CSV.
    #[arg(long)]
    from: PathBuf,
    /// Number of texts to select.
    #[arg(long, default_value_t = 12)]
    select: usize,
    /// Subtract column means before selection and plotting.
    #[arg(long)]
    center: bool,
    /// Output file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Csv,
    Svg,
}

impl From<FormatArg> for PlotFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => PlotFormat::Csv,
            FormatArg::Svg => PlotFormat::Svg,
        }
    }
}

#[derive(Args, Debug)]
struct CurveCmd {
    /// Text length.
    #[arg(long = "N", default_value_t = 300)]
    n_tokens: u64,
    /// Highest type frequency to plot.
    #[arg(long, default_value_t = 20)]
    f_max: u64,
    /// Smallest sample size.
    #[arg(long, default_value_t = 10)]
    n_min: u64,
    /// Largest sample size; defaults to N.
    #[arg(long)]
    n_max: Option<u64>,
    /// Sample size step.
    #[arg(long, default_value_t = 1)]
    n_step: u64,
    /// Output file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args, Debug)]
struct WeightsCmd {
    #[arg(long)]
    index: String,
    /// Text length.
    #[arg(long = "N")]
    n_tokens: usize,
    #[arg(long)]
    n: usize,
}

/// Sidecar for outputs of single-step commands.
#[derive(Serialize)]
struct CommandMeta<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    args: T,
}

fn write_output<T: Serialize>(out: Option<&Path>, bytes: &[u8], command: &str, seed: u64, args: T) -> Result<()> {
    match out {
        Some(path) => {
            let mut set = OutputSet::new();
            let meta = CommandMeta {
                tool: "lexdiv",
                version: env!("CARGO_PKG_VERSION"),
                command,
                seed,
                args,
            };
            set.write_with_meta(path, bytes, &meta)?;
            set.commit();
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn read_matrix(path: &Path) -> Result<ScoreMatrix> {
    let f = std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    ScoreMatrix::read_csv(f).with_context(|| format!("reading {}", path.display()))
}

fn base_config(cli: &Cli) -> Result<RunConfig> {
    let mut c = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    Ok(c)
}

fn apply_corpus(c: &mut RunConfig, a: &CorpusArgs) {
    if let Some(p) = &a.corpus {
        c.corpus = Some(p.clone());
    }
    if let Some(case) = a.case {
        c.case = case.into();
    }
    if let Some(m) = a.min_length {
        c.min_length = m;
    }
    if let Some(s) = &a.scores {
        c.scores = Some(s.clone());
    }
}

fn apply_indices(c: &mut RunConfig, a: &IndexArgs) -> Result<()> {
    if a.explicit() {
        c.indices = a.entries(&c.indices)?;
    }
    Ok(())
}

fn finish_experiment(c: &RunConfig) -> Result<()> {
    let report = run_experiment(c)?;
    for f in &report.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let mut config = base_config(&cli)?;
    match &cli.command {
        Command::Index(cmd) => {
            apply_corpus(&mut config, &cmd.corpus);
            apply_indices(&mut config, &cmd.index)?;
            let dir = config.corpus.clone().context("--corpus is required")?;
            let loaded = load_corpus_with_scores(&dir, &config)?;
            let rows = index_table(&loaded.corpus, &config.index_specs(), config.seed)?;
            let bytes = match cmd.format {
                TableFormat::Csv => index_table_csv(&rows)?,
                TableFormat::Json => to_json(&rows)?,
            };
            write_output(cmd.out.as_deref(), &bytes, "index", config.seed, &config)?;
        }
        Command::EvaluateLength(cmd) => {
            config.experiment = Experiment::Length;
            apply_corpus(&mut config, &cmd.corpus);
            apply_indices(&mut config, &cmd.index)?;
            if !cmd.methods.is_empty() {
                config.methods = cmd
                    .methods
                    .iter()
                    .map(|m| m.parse::<Method>())
                    .collect::<Result<_, _>>()?;
            }
            if let Some(t) = cmd.truncate {
                config.truncate_to = Some(t);
            }
            if let Some(d) = &cmd.divisors {
                config.divisors = d.clone();
            }
            if let Some(l) = &cmd.lengths {
                config.lengths = Some(l.clone());
            }
            if let Some(i) = cmd.iterations {
                config.iterations = i;
            }
            if let Some(p) = cmd.profiles {
                config.profiles = p;
            }
            if let Some(o) = &cmd.out_dir {
                config.out_dir = o.clone();
            }
            finish_experiment(&config)?;
        }
        Command::EvaluateParameter(cmd) => {
            config.experiment = Experiment::Parameter;
            apply_corpus(&mut config, &cmd.corpus);
            apply_indices(&mut config, &cmd.index)?;
            if cmd.index.indices.is_empty() && cli.config.is_none() {
                config.indices = IndexKind::ALL
                    .iter()
                    .filter(|k| k.uses_n() || **k == IndexKind::Mtld)
                    .map(|&k| IndexEntry::new(k))
                    .collect();
            }
            if let Some(r) = &cmd.range {
                config.parameter_range = Some(r.clone());
            }
            if let Some(p) = cmd.profiles {
                config.profiles = p;
            }
            if let Some(o) = &cmd.out_dir {
                config.out_dir = o.clone();
            }
            finish_experiment(&config)?;
        }
        Command::Stats(s) => run_stats(s, config.seed)?,
        Command::Profiles(cmd) => {
            let m = read_matrix(&cmd.from)?;
            let m = if cmd.center { center_columns(&m) } else { m };
            // Selection warnings are logged by the library.
            let sel = select_profiles(&m, cmd.select)?;
            let plot = PlotData::from_selection(&m, &sel)?;
            let bytes = plot_bytes(&plot, cmd.format.into())?;
            #[derive(Serialize)]
            struct Meta<'a> {
                from: &'a Path,
                select: usize,
                center: bool,
                selection: &'a lexdiv::profiles::ProfileSelection,
            }
            let meta = Meta {
                from: &cmd.from,
                select: cmd.select,
                center: cmd.center,
                selection: &sel,
            };
            write_output(Some(&cmd.out), &bytes, "profiles", config.seed, meta)?;
        }
        Command::HddCurve(cmd) => {
            let n_max = cmd.n_max.unwrap_or(cmd.n_tokens);
            if cmd.n_step == 0 {
                bail!("--n-step must be positive");
            }
            let f: Vec<u64> = (1..=cmd.f_max).collect();
            let n: Vec<u64> = (cmd.n_min..=n_max).step_by(cmd.n_step as usize).collect();
            let curves = hdd_presence_curves(cmd.n_tokens, &f, &n)?;
            let bytes = plot_bytes(&curves, cmd.format.into())?;
            #[derive(Serialize)]
            struct Meta {
                n_tokens: u64,
                f_max: u64,
                n_min: u64,
                n_max: u64,
                n_step: u64,
            }
            let meta = Meta {
                n_tokens: cmd.n_tokens,
                f_max: cmd.f_max,
                n_min: cmd.n_min,
                n_max,
                n_step: cmd.n_step,
            };
            write_output(Some(&cmd.out), &bytes, "hdd-curve", config.seed, meta)?;
        }
        Command::Weights(cmd) => {
            let kind: IndexKind = cmd.index.parse()?;
            let w = token_weights(kind, cmd.n_tokens, cmd.n)?;
            let line: Vec<String> = w.iter().map(f64::to_string).collect();
            println!("{}", line.join(","));
        }
    }
    Ok(())
}

fn plot_bytes(plot: &PlotData, format: PlotFormat) -> Result<Vec<u8>> {
    Ok(match format {
        PlotFormat::Csv => {
            let mut buf = Vec::new();
            plot.write_csv(&mut buf)?;
            buf
        }
        PlotFormat::Svg => plot.to_svg().into_bytes(),
    })
}

fn read_criterion(path: &Path) -> Result<Vec<(String, f64)>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.with_context(|| format!("reading {}", path.display()))?;
        let v: f64 = rec
            .get(1)
            .unwrap_or("")
            .trim()
            .parse()
            .with_context(|| format!("{}: bad score for `{}`", path.display(), &rec[0]))?;
        out.push((rec[0].trim().to_string(), v));
    }
    Ok(out)
}

fn run_stats(cmd: &StatsCmd, seed: u64) -> Result<()> {
    match cmd {
        StatsCmd::Icc { from, mode, out } => {
            let m = read_matrix(from)?;
            let modes: &[IccMode] = match mode {
                IccModeArg::Agreement => &[IccMode::Agreement],
                IccModeArg::Consistency => &[IccMode::Consistency],
                IccModeArg::Both => &[IccMode::Agreement, IccMode::Consistency],
            };
            let results = modes
                .iter()
                .map(|&md| icc_2_1(&m, md))
                .collect::<Result<Vec<_>, _>>()?;
            write_output(out.as_deref(), &to_json(&results)?, "stats icc", seed, from)?;
        }
        StatsCmd::Anova { from, out } => {
            let m = read_matrix(from)?;
            let a = rm_anova(&m)?;
            write_output(out.as_deref(), &to_json(&a)?, "stats anova", seed, from)?;
        }
        StatsCmd::CompareCorr(c) => {
            let json = if let Some(from) = &c.from {
                let m = read_matrix(from)?;
                let crit = read_criterion(c.criterion.as_ref().expect("required by clap"))?;
                let col = |label: &str| -> Result<usize> {
                    m.col_labels()
                        .iter()
                        .position(|l| l == label)
                        .with_context(|| format!("no condition `{label}` in {}", from.display()))
                };
                let (jl, js) = (col(c.large.as_ref().unwrap())?, col(c.small.as_ref().unwrap())?);
                let (mut x, mut yl, mut ys) = (Vec::new(), Vec::new(), Vec::new());
                for (id, v) in &crit {
                    if let Some(i) = m.row_ids().iter().position(|r| r == id) {
                        x.push(*v);
                        yl.push(m.get(i, jl));
                        ys.push(m.get(i, js));
                    }
                }
                to_json(&compare_correlations(&x, &yl, &ys)?)?
            } else {
                let (Some(r_jk), Some(r_jh), Some(r_kh), Some(n)) = (c.r_jk, c.r_jh, c.r_kh, c.n) else {
                    bail!("give either --from/--criterion/--large/--small or --r-jk/--r-jh/--r-kh/--n");
                };
                let t = steiger_t(r_jk, r_jh, r_kh, n)?;
                let (lo, hi) = zou_ci(r_jk, r_jh, r_kh, n, 0.05)?;
                to_json(&lexdiv::stats::CorrComparison {
                    r_large: r_jk,
                    r_small: r_jh,
                    r_between: r_kh,
                    n,
                    t: t.t,
                    df: t.df,
                    p: t.p,
                    zou_low: lo,
                    zou_high: hi,
                })?
            };
            write_output(c.out.as_deref(), &json, "stats compare-corr", seed, ())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
