use std::ffi::{c_char, CStr, CString};
use std::ptr;

use lexdiv::stats::{icc_2_1, rm_anova, steiger_t};
use lexdiv::{IccMode, IndexKind, IndexSpec, ScoreMatrix, Text};
use lexdiv_ffi::*;

fn last_error() -> Option<String> {
    let p = lexdiv_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

fn text(id: &str, content: &str) -> *mut LexdivText {
    let (id, content) = (CString::new(id).unwrap(), CString::new(content).unwrap());
    let mut out = ptr::null_mut();
    let status = unsafe { lexdiv_text_new(id.as_ptr(), content.as_ptr(), false, &mut out) };
    assert_eq!(status, LexdivStatus::Ok, "{:?}", last_error());
    out
}

fn score(t: *const LexdivText, spec: &LexdivIndexSpec) -> (LexdivStatus, f64) {
    let mut v = f64::NAN;
    let status = unsafe { lexdiv_score(t, spec, &mut v, ptr::null_mut()) };
    (status, v)
}

fn words(n: usize, vocab: usize) -> String {
    (0..n).map(|i| format!("w{}", (i * 7 + i / 3) % vocab)).collect::<Vec<_>>().join(" ")
}

const ROWS: [[f64; 3]; 6] = [
    [9.0, 2.0, 5.0],
    [6.0, 1.0, 3.0],
    [8.0, 4.0, 6.0],
    [7.0, 1.0, 2.0],
    [10.0, 5.0, 6.0],
    [6.0, 2.0, 4.0],
];

fn matrix() -> *mut LexdivScoreMatrix {
    let flat: Vec<f64> = ROWS.iter().flatten().copied().collect();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { lexdiv_matrix_new(6, 3, flat.as_ptr(), &mut m) }, LexdivStatus::Ok);
    m
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(lexdiv_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn text_counts_and_case_folding() {
    let t = text("a", "The the CAT cat sat");
    let (mut tokens, mut types) = (0, 0);
    assert_eq!(unsafe { lexdiv_text_counts(t, &mut tokens, &mut types) }, LexdivStatus::Ok);
    assert_eq!((tokens, types), (5, 3));
    unsafe { lexdiv_text_free(t) };
}

#[test]
fn scores_agree_with_core() {
    let content = words(300, 90);
    let t = text("x", &content);
    let core = Text::from_whitespace("x", &content, lexdiv::CasePolicy::Fold).unwrap();
    for kind in [
        LexdivIndexKind::Ttr,
        LexdivIndexKind::GuiraudR,
        LexdivIndexKind::HerdanC,
        LexdivIndexKind::MaasA,
        LexdivIndexKind::Mttrrs,
        LexdivIndexKind::Hdd,
        LexdivIndexKind::Mattr,
        LexdivIndexKind::Msttr,
        LexdivIndexKind::Mttrss,
        LexdivIndexKind::Mtld,
    ] {
        let spec = lexdiv_index_spec_default(kind);
        let (status, v) = score(t, &spec);
        assert_eq!(status, LexdivStatus::Ok);
        let expected = IndexSpec::new(IndexKind::from(kind)).score(core.codes()).unwrap().value;
        assert_eq!(v, expected, "{kind:?}");
    }
    unsafe { lexdiv_text_free(t) };
}

#[test]
fn small_examples_through_codes() {
    let codes = [0u32, 0, 1, 1];
    let mut v = 0.0;
    let ttr = lexdiv_index_spec_default(LexdivIndexKind::Ttr);
    assert_eq!(unsafe { lexdiv_score_codes(codes.as_ptr(), 4, &ttr, &mut v) }, LexdivStatus::Ok);
    assert_eq!(v, 0.5);
    let mut hdd = lexdiv_index_spec_default(LexdivIndexKind::Hdd);
    hdd.n = 2;
    assert_eq!(unsafe { lexdiv_score_codes(codes.as_ptr(), 4, &hdd, &mut v) }, LexdivStatus::Ok);
    assert!((v - 5.0 / 6.0).abs() < 1e-15);
}

#[test]
fn mtld_flag_is_reported() {
    let t = text("u", &(0..30).map(|i| format!("t{i}")).collect::<Vec<_>>().join(" "));
    let spec = lexdiv_index_spec_default(LexdivIndexKind::Mtld);
    let (mut v, mut flag) = (0.0, false);
    assert_eq!(unsafe { lexdiv_score(t, &spec, &mut v, &mut flag) }, LexdivStatus::Ok);
    assert_eq!(v, 30.0);
    assert!(flag);
    unsafe { lexdiv_text_free(t) };
}

#[test]
fn errors_set_and_clear_last_message() {
    let t = text("short", "a b c");
    let mut spec = lexdiv_index_spec_default(LexdivIndexKind::Mattr);
    spec.n = 50;
    let (status, _) = score(t, &spec);
    assert_eq!(status, LexdivStatus::Index);
    let msg = last_error().unwrap();
    assert!(msg.contains("50"), "{msg}");

    let ttr = lexdiv_index_spec_default(LexdivIndexKind::Ttr);
    assert_eq!(score(t, &ttr).0, LexdivStatus::Ok);
    assert_eq!(last_error(), None);

    assert_eq!(score(ptr::null(), &ttr).0, LexdivStatus::NullPointer);
    assert!(last_error().unwrap().contains("text"));

    let bad = [0xffu8, 0xfe, 0];
    let id = CString::new("b").unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { lexdiv_text_new(id.as_ptr(), bad.as_ptr().cast::<c_char>(), false, &mut out) };
    assert_eq!(status, LexdivStatus::InvalidUtf8);
    assert!(out.is_null());

    spec.n = 0;
    assert_eq!(score(t, &spec).0, LexdivStatus::Index);
    unsafe { lexdiv_text_free(t) };
}

#[test]
fn last_error_is_per_thread() {
    assert_eq!(score(ptr::null(), &lexdiv_index_spec_default(LexdivIndexKind::Ttr)).0, LexdivStatus::NullPointer);
    std::thread::spawn(|| assert_eq!(last_error(), None)).join().unwrap();
    assert!(last_error().is_some());
}

#[test]
fn weights_and_presence() {
    let mut w = vec![0.0; 10];
    let status = unsafe { lexdiv_token_weights(LexdivIndexKind::Mattr, 10, 4, w.as_mut_ptr()) };
    assert_eq!(status, LexdivStatus::Ok);
    assert_eq!(w, lexdiv::indices::token_weights(IndexKind::Mattr, 10, 4).unwrap());

    let mut p = 0.0;
    assert_eq!(unsafe { lexdiv_hypergeom_presence(300, 1, 42, &mut p) }, LexdivStatus::Ok);
    assert_eq!(p, 42.0 / 300.0);
    assert_eq!(unsafe { lexdiv_hypergeom_presence(10, 3, 20, &mut p) }, LexdivStatus::InvalidArgument);
}

#[test]
fn corpus_run_and_csv() {
    let corpus = lexdiv_corpus_new();
    for (i, vocab) in [40, 70, 100].into_iter().enumerate() {
        let t = text(&format!("t{i}"), &words(120, vocab));
        assert_eq!(unsafe { lexdiv_corpus_add_text(corpus, t) }, LexdivStatus::Ok);
        if i == 0 {
            assert_eq!(unsafe { lexdiv_corpus_add_text(corpus, t) }, LexdivStatus::InvalidArgument);
        }
        unsafe { lexdiv_text_free(t) };
    }
    assert_eq!(unsafe { lexdiv_corpus_len(corpus) }, 3);

    let divisors = [1usize, 2, 3, 4];
    let config = LexdivSamplingConfig {
        method: LexdivMethod::Parallel,
        truncate_to: 0,
        divisors: divisors.as_ptr(),
        n_divisors: divisors.len(),
        iterations: 1,
        seed: 7,
    };
    let spec = lexdiv_index_spec_default(LexdivIndexKind::Ttr);
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { lexdiv_run_method(corpus, &config, &spec, &mut m) }, LexdivStatus::Ok);
    let (mut rows, mut cols) = (0, 0);
    assert_eq!(unsafe { lexdiv_matrix_shape(m, &mut rows, &mut cols) }, LexdivStatus::Ok);
    assert_eq!((rows, cols), (3, 4));

    let mut values = vec![0.0; 12];
    assert_eq!(unsafe { lexdiv_matrix_values(m, values.as_mut_ptr(), 12) }, LexdivStatus::Ok);
    assert!(values.iter().all(|v| *v > 0.0 && *v <= 1.0));
    assert_eq!(unsafe { lexdiv_matrix_values(m, values.as_mut_ptr(), 11) }, LexdivStatus::InvalidArgument);

    let mut csv = ptr::null_mut();
    assert_eq!(unsafe { lexdiv_matrix_to_csv(m, &mut csv) }, LexdivStatus::Ok);
    let s = unsafe { CStr::from_ptr(csv) }.to_str().unwrap().to_owned();
    unsafe { lexdiv_string_free(csv) };
    assert!(s.starts_with("text_id,condition,score\n"));
    assert_eq!(s.lines().count(), 13);

    let alt = LexdivSamplingConfig {
        method: LexdivMethod::Alternating,
        divisors: [0usize].as_ptr(),
        n_divisors: 1,
        ..config
    };
    let mut bad = ptr::null_mut();
    assert_ne!(unsafe { lexdiv_run_method(corpus, &alt, &spec, &mut bad) }, LexdivStatus::Ok);
    assert!(bad.is_null());

    unsafe {
        lexdiv_matrix_free(m);
        lexdiv_corpus_free(corpus);
    }
}

#[test]
fn statistics_agree_with_core() {
    let core = ScoreMatrix::from_rows(&ROWS.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap();
    let m = matrix();
    for (mode, core_mode) in [
        (LexdivIccMode::Agreement, IccMode::Agreement),
        (LexdivIccMode::Consistency, IccMode::Consistency),
    ] {
        let mut r = LexdivIcc::default();
        assert_eq!(unsafe { lexdiv_icc(m, mode, &mut r) }, LexdivStatus::Ok);
        let e = icc_2_1(&core, core_mode).unwrap();
        assert_eq!((r.estimate, r.ci_low, r.ci_high), (e.estimate, e.ci_low, e.ci_high));
    }
    let mut a = LexdivAnova::default();
    assert_eq!(unsafe { lexdiv_rm_anova(m, &mut a) }, LexdivStatus::Ok);
    let e = rm_anova(&core).unwrap();
    assert_eq!((a.f, a.df1, a.df2, a.p), (e.f, e.df1, e.df2, e.p));
    unsafe { lexdiv_matrix_free(m) };

    let mut c = LexdivCorrTest::default();
    assert_eq!(unsafe { lexdiv_compare_correlations(0.342, 0.285, 0.88, 188, &mut c) }, LexdivStatus::Ok);
    let e = steiger_t(0.342, 0.285, 0.88, 188).unwrap();
    assert_eq!((c.t, c.df, c.p), (e.t, e.df, e.p));
    assert!(c.zou_low < 0.342 - 0.285 && 0.342 - 0.285 < c.zou_high);
    assert_eq!(
        unsafe { lexdiv_compare_correlations(1.5, 0.2, 0.3, 50, &mut c) },
        LexdivStatus::Stats
    );
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        lexdiv_text_free(ptr::null_mut());
        lexdiv_corpus_free(ptr::null_mut());
        lexdiv_matrix_free(ptr::null_mut());
        lexdiv_string_free(ptr::null_mut());
    }
    assert_eq!(unsafe { lexdiv_corpus_len(ptr::null()) }, 0);
}
