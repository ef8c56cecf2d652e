mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lexdiv::ScoreMatrix;

fn lexdiv() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lexdiv"));
    c.env_remove("LEXDIV_SEED").env_remove("RUST_LOG");
    c
}

fn run(args: &[&str]) -> Output {
    lexdiv().args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_corpus(dir: &Path, n: usize, seed: u64) {
    write_corpus_sized(dir, n, 80, 120, seed);
}

fn write_corpus_sized(dir: &Path, n: usize, min: usize, max: usize, seed: u64) {
    let corpus = common::zipf_corpus(n, min, max, seed);
    for t in corpus.texts() {
        fs::write(dir.join(format!("{}.txt", t.id())), t.tokens().join(" ")).unwrap();
    }
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    v.sort();
    v
}

#[test]
fn index_reference_text() {
    let dir = common::data_dir().join("alice");
    let out = ok(&["index", "--corpus", path_str(&dir), "--index", "hdd", "--n", "42"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("text_id,index,param,score,flags"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..2], ["alice", "hdd"]);
    let score: f64 = row[3].parse().unwrap();
    assert!((score - 0.8278).abs() < 5e-5, "{score}");
}

#[test]
fn index_all_defaults_and_json() {
    let dir = common::data_dir().join("alice");
    let csv = ok(&["index", "--corpus", path_str(&dir)]);
    assert_eq!(csv.lines().count(), 11);
    let json = ok(&["index", "--corpus", path_str(&dir), "--index", "ttr,mtld", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    assert_eq!(rows[0]["index"], "ttr");
    assert!((rows[0]["score"].as_f64().unwrap() - 100.0 / 165.0).abs() < 1e-12);
}

#[test]
fn index_writes_file_and_sidecar() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("scores.csv");
    let dir = common::data_dir().join("alice");
    ok(&["index", "--corpus", path_str(&dir), "--index", "mattr", "--out", path_str(&out)]);
    assert!(fs::read_to_string(&out).unwrap().starts_with("text_id,"));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("scores.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], lexdiv::DEFAULT_SEED);
    assert_eq!(meta["command"], "index");
}

#[test]
fn weights_output() {
    assert_eq!(ok(&["weights", "--index", "mattr", "--N", "10", "--n", "4"]).trim(), "1,2,3,4,4,4,4,3,2,1");
    assert_eq!(ok(&["weights", "--index", "msttr", "--N", "10", "--n", "4"]).trim(), "1,1,1,1,1,1,1,1,0,0");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["index", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    let out = run(&["index", "--corpus", "/definitely/missing"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
    assert_eq!(run(&["weights", "--index", "nope", "--N", "10", "--n", "4"]).status.code(), Some(1));
    assert_eq!(run(&["weights", "--index", "mattr", "--N", "3", "--n", "4"]).status.code(), Some(1));
}

#[test]
fn evaluate_length_outputs_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    write_corpus(&corpus, 6, 21);
    let args = |out: &Path, threads: &str| {
        ok(&[
            "evaluate-length",
            "--corpus",
            path_str(&corpus),
            "--index",
            "ttr,mattr,mttrrs",
            "--n",
            "10",
            "--method",
            "parallel,random,alternating",
            "--truncate",
            "80",
            "--iters",
            "25",
            "--threads",
            threads,
            "--out-dir",
            path_str(out),
        ])
    };
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let listed = args(&a, "1");
    args(&b, "3");
    let files = csv_files(&a);
    // Per method and index: scores and profiles.
    assert_eq!(files.len(), 3 * 3 * 2);
    assert_eq!(listed.lines().count(), 3 * 3 * 5);
    for f in &files {
        let name = f.file_name().unwrap();
        assert_eq!(fs::read(f).unwrap(), fs::read(b.join(name)).unwrap(), "{name:?}");
        assert!(a.join(format!("{}.meta.json", name.to_str().unwrap())).exists());
    }
    let m = ScoreMatrix::read_csv(fs::File::open(a.join("random_mattr.csv")).unwrap()).unwrap();
    assert_eq!((m.n_rows(), m.n_cols()), (6, 4));
    assert_eq!(m.col_labels(), ["80", "40", "26", "20"]);
    let icc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("random_mattr_icc.json")).unwrap()).unwrap();
    assert!(icc["icc_agreement"]["ok"]["estimate"].is_f64());
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("random_mattr.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["iterations"], 25);
    assert_eq!(meta["matrix"]["seed"], lexdiv::DEFAULT_SEED);
}

#[test]
fn seed_from_config_env_and_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    write_corpus(&corpus, 4, 3);
    let config = tmp.path().join("run.toml");
    fs::write(
        &config,
        format!(
            "corpus = {:?}\nmethods = [\"random\"]\niterations = 10\ntruncate_to = 60\n\n[[indices]]\nkind = \"ttr\"\n",
            path_str(&corpus)
        ),
    )
    .unwrap();
    let score_file = |dir: &str, seed: Option<(&str, &str)>| {
        let out = tmp.path().join(dir);
        let mut cmd = lexdiv();
        cmd.args(["evaluate-length", "--config", path_str(&config), "--out-dir", path_str(&out)]);
        match seed {
            Some(("env", s)) => {
                cmd.env("LEXDIV_SEED", s);
            }
            Some((_, s)) => {
                cmd.args(["--seed", s]);
            }
            None => {}
        }
        let o = cmd.output().unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read_to_string(out.join("random_ttr.csv")).unwrap()
    };
    let default = score_file("d", None);
    let env = score_file("e", Some(("env", "7")));
    let flag = score_file("f", Some(("flag", "7")));
    assert_eq!(env, flag);
    assert_ne!(default, env);
    assert_eq!(default.lines().count(), 1 + 4 * 4);
}

#[test]
fn bad_config_is_a_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.toml");
    fs::write(&config, "iterations = \"many\"\n").unwrap();
    let out = run(&["evaluate-length", "--config", path_str(&config)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn criterion_scores_add_correlation_report() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    write_corpus(&corpus, 8, 9);
    let scores = tmp.path().join("scores.csv");
    let mut body = String::from("id,score\n");
    for i in 0..8 {
        body.push_str(&format!("z{i:03},{}\n", (i * 7 % 5) as f64 + 0.5 * i as f64));
    }
    body.push_str("stranger,3\n");
    fs::write(&scores, body).unwrap();
    let out_dir = tmp.path().join("out");
    let out = lexdiv()
        .args([
            "evaluate-length",
            "--corpus",
            path_str(&corpus),
            "--scores",
            path_str(&scores),
            "--index",
            "ttr",
            "--method",
            "parallel",
            "--truncate",
            "80",
            "--out-dir",
            path_str(&out_dir),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("stranger"));
    let icc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("parallel_ttr_icc.json")).unwrap()).unwrap();
    assert_eq!(icc["criterion"]["ok"]["n"], 8);
    assert_eq!(icc["criterion"]["ok"]["df"], 5);

    let sweep_dir = tmp.path().join("sweep");
    ok(&[
        "evaluate-parameter",
        "--corpus",
        path_str(&corpus),
        "--scores",
        path_str(&scores),
        "--index",
        "mattr",
        "--params",
        "10:50:20",
        "--out-dir",
        path_str(&sweep_dir),
    ]);
    let sweep: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(sweep_dir.join("parameter_mattr_icc.json")).unwrap()).unwrap();
    assert_eq!(sweep["criterion"]["ok"]["n"], 8);
}

#[test]
fn stats_commands() {
    let tmp = tempfile::tempdir().unwrap();
    let from = tmp.path().join("m.csv");
    fs::write(&from, common::icc_fixture().to_csv_string()).unwrap();
    let icc: serde_json::Value =
        serde_json::from_str(&ok(&["stats", "icc", "--from", path_str(&from)])).unwrap();
    assert_eq!(icc.as_array().unwrap().len(), 2);
    let est = icc[0]["estimate"].as_f64().unwrap();
    assert!((est - common::ICC6X4_AGREEMENT.0).abs() < 1e-10);
    assert_eq!(icc[1]["mode"], "consistency");

    let anova: serde_json::Value =
        serde_json::from_str(&ok(&["stats", "anova", "--from", path_str(&from)])).unwrap();
    assert!((anova["F"].as_f64().unwrap() - common::ANOVA6X4.0).abs() < 1e-9);
    assert_eq!(anova["df1"], 3);

    let ((rjk, rjh, rkh, n), (t, _), _) = common::CORR_TRIPLES[0];
    let cmp: serde_json::Value = serde_json::from_str(&ok(&[
        "stats",
        "compare-corr",
        "--r-jk",
        &rjk.to_string(),
        "--r-jh",
        &rjh.to_string(),
        "--r-kh",
        &rkh.to_string(),
        "--n",
        &n.to_string(),
    ]))
    .unwrap();
    assert!((cmp["t"].as_f64().unwrap() - t).abs() < 1e-10);

    let crit = tmp.path().join("crit.csv");
    fs::write(&crit, "id,score\nr0,1\nr1,4\nr2,2\nr3,3\nr4,6\nr5,5\n").unwrap();
    let cmp: serde_json::Value = serde_json::from_str(&ok(&[
        "stats",
        "compare-corr",
        "--from",
        path_str(&from),
        "--criterion",
        path_str(&crit),
        "--large",
        "c0",
        "--small",
        "c3",
    ]))
    .unwrap();
    assert_eq!(cmp["n"], 6);
    assert_eq!(run(&["stats", "compare-corr", "--r-jk", "0.3"]).status.code(), Some(2));
}

#[test]
fn profiles_and_curves() {
    let tmp = tempfile::tempdir().unwrap();
    let from = tmp.path().join("m.csv");
    fs::write(&from, common::anova_fixture().to_csv_string()).unwrap();
    let out = tmp.path().join("p.csv");
    ok(&["profiles", "--from", path_str(&from), "--select", "6", "--center", "--out", path_str(&out)]);
    let body = fs::read_to_string(&out).unwrap();
    assert_eq!(body.lines().count(), 1 + 6 * 3);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("p.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["args"]["selection"]["selected_ids"].as_array().unwrap().len(), 6);

    let curve = tmp.path().join("fig.csv");
    ok(&["hdd-curve", "--N", "300", "--out", path_str(&curve)]);
    assert_eq!(fs::read_to_string(&curve).unwrap().lines().count(), 1 + 20 * 291);
    let svg = tmp.path().join("fig.svg");
    ok(&["hdd-curve", "--N", "50", "--f-max", "3", "--out", path_str(&svg), "--format", "svg"]);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn evaluate_parameter_sweeps() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    // The default window sweep runs up to 240 tokens.
    write_corpus_sized(&corpus, 5, 240, 300, 4);
    let out = tmp.path().join("out");
    ok(&[
        "evaluate-parameter",
        "--corpus",
        path_str(&corpus),
        "--index",
        "mattr",
        "--params",
        "10:50:10",
        "--out-dir",
        path_str(&out),
    ]);
    let m = ScoreMatrix::read_csv(fs::File::open(out.join("parameter_mattr.csv")).unwrap()).unwrap();
    assert_eq!(m.col_labels(), ["10", "20", "30", "40", "50"]);
    assert!(out.join("parameter_mattr_profiles.csv").exists());

    let out2 = tmp.path().join("out2");
    ok(&["evaluate-parameter", "--corpus", path_str(&corpus), "--out-dir", path_str(&out2)]);
    let names: Vec<String> = csv_files(&out2)
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .filter(|n| !n.ends_with("_profiles.csv"))
        .collect();
    assert_eq!(names.len(), 6, "{names:?}");
    let mtld = ScoreMatrix::read_csv(fs::File::open(out2.join("parameter_mtld.csv")).unwrap()).unwrap();
    assert_eq!(mtld.n_cols(), 10);
}

#[test]
fn failed_run_leaves_no_partial_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    write_corpus(&corpus, 3, 1);
    let out = tmp.path().join("out");
    // TTR succeeds first, then MATTR with a window wider than the quarter segments fails.
    let o = run(&[
        "evaluate-length",
        "--corpus",
        path_str(&corpus),
        "--index",
        "ttr,mattr",
        "--n",
        "50",
        "--method",
        "parallel",
        "--truncate",
        "80",
        "--out-dir",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(fs::read_dir(&out).map(|d| d.count()).unwrap_or(0) == 0);
}
