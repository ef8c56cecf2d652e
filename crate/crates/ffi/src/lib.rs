//! C interface to `lexdiv`.
//!
//! Every function returns a [`LexdivStatus`]; on failure the message is
//! available from [`lexdiv_last_error_message`] on the calling thread.
//! Objects are opaque handles created by `*_new`/`*_load` functions and
//! released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use lexdiv::indices::token_weights;
use lexdiv::numerics::hypergeom_presence;
use lexdiv::sampling::{run_method, Conditions};
use lexdiv::stats::{icc_2_1, rm_anova, steiger_t, zou_ci};
use lexdiv::{
    CasePolicy, Corpus, IccMode, IndexKind, IndexSpec, LexdivError, MaasVariant, Method, SamplingConfig,
    ScoreMatrix, Text,
};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexdivStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    /// Bad index parameters, or an index or condition undefined for this text.
    Index = 5,
    Stats = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexdivIndexKind {
    Ttr = 0,
    GuiraudR = 1,
    HerdanC = 2,
    MaasA = 3,
    Mttrrs = 4,
    Hdd = 5,
    Mattr = 6,
    Msttr = 7,
    Mttrss = 8,
    Mtld = 9,
}

impl From<LexdivIndexKind> for IndexKind {
    fn from(k: LexdivIndexKind) -> Self {
        match k {
            LexdivIndexKind::Ttr => IndexKind::Ttr,
            LexdivIndexKind::GuiraudR => IndexKind::GuiraudR,
            LexdivIndexKind::HerdanC => IndexKind::HerdanC,
            LexdivIndexKind::MaasA => IndexKind::MaasA,
            LexdivIndexKind::Mttrrs => IndexKind::Mttrrs,
            LexdivIndexKind::Hdd => IndexKind::Hdd,
            LexdivIndexKind::Mattr => IndexKind::Mattr,
            LexdivIndexKind::Msttr => IndexKind::Msttr,
            LexdivIndexKind::Mttrss => IndexKind::Mttrss,
            LexdivIndexKind::Mtld => IndexKind::Mtld,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexdivMaasVariant {
    NaturalLogA = 0,
    Base10ASquared = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexdivMethod {
    Parallel = 0,
    Random = 1,
    OrderedRandom = 2,
    Alternating = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexdivIccMode {
    Agreement = 0,
    Consistency = 1,
}

/// Index and parameters. Obtain defaults from [`lexdiv_index_spec_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LexdivIndexSpec {
    pub kind: LexdivIndexKind,
    pub n: usize,
    pub s: usize,
    pub factor: f64,
    pub maas_variant: LexdivMaasVariant,
    pub mtld_min_segment: usize,
    /// Seed for MTTRRS and MTTRSS.
    pub seed: u64,
}

impl LexdivIndexSpec {
    fn to_spec(self) -> IndexSpec {
        let mut spec = IndexSpec::new(self.kind.into())
            .with_n(self.n)
            .with_s(self.s)
            .with_factor(self.factor)
            .with_maas_variant(match self.maas_variant {
                LexdivMaasVariant::NaturalLogA => MaasVariant::NaturalLogA,
                LexdivMaasVariant::Base10ASquared => MaasVariant::Base10ASquared,
            })
            .with_seed(self.seed);
        spec.mtld_min_segment = self.mtld_min_segment;
        spec
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LexdivSamplingConfig {
    pub method: LexdivMethod,
    /// Truncation length; 0 uses the shortest text.
    pub truncate_to: usize,
    /// Length divisors, or k values for alternating sampling.
    pub divisors: *const usize,
    pub n_divisors: usize,
    pub iterations: usize,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LexdivIcc {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ms_rows: f64,
    pub ms_cols: f64,
    pub ms_error: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LexdivAnova {
    pub f: f64,
    pub df1: usize,
    pub df2: usize,
    pub p: f64,
    pub partial_eta_sq: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LexdivCorrTest {
    pub t: f64,
    pub df: usize,
    pub p: f64,
    pub zou_low: f64,
    pub zou_high: f64,
}

/// Opaque tokenized text.
pub struct LexdivText(Text);

/// Opaque collection of texts with unique ids.
pub struct LexdivCorpus(Corpus);

/// Opaque texts × conditions score grid.
pub struct LexdivScoreMatrix(ScoreMatrix);

struct Failure {
    status: LexdivStatus,
    message: String,
}

impl Failure {
    fn new(status: LexdivStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<LexdivError> for Failure {
    fn from(e: LexdivError) -> Self {
        let status = match &e {
            LexdivError::Io { .. } | LexdivError::EmptyDirectory(_) | LexdivError::Csv { .. } => LexdivStatus::Io,
            LexdivError::Index { .. }
            | LexdivError::Condition { .. }
            | LexdivError::TooShort { .. }
            | LexdivError::Text { .. } => LexdivStatus::Index,
            LexdivError::Stats(_) => LexdivStatus::Stats,
            _ => LexdivStatus::InvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

type FfiResult = Result<(), Failure>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult) -> LexdivStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            LexdivStatus::Ok
        }
        Ok(Err(fail)) => {
            set_error(&fail.message);
            fail.status
        }
        Err(_) => {
            set_error("internal panic");
            LexdivStatus::Panic
        }
    }
}

fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: callers pass either null or a pointer obtained from this library.
    unsafe { p.as_ref() }.ok_or_else(|| Failure::new(LexdivStatus::NullPointer, format!("{what} is null")))
}

fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: callers pass either null or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or_else(|| Failure::new(LexdivStatus::NullPointer, format!("{what} is null")))
}

fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(LexdivStatus::NullPointer, format!("{what} is null")));
    }
    // SAFETY: non-null and NUL-terminated by contract.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Failure::new(LexdivStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::new(LexdivStatus::NullPointer, format!("{what} is null")));
    }
    // SAFETY: non-null and valid for `len` elements by contract.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::new(LexdivStatus::NullPointer, format!("{what} is null")));
    }
    // SAFETY: non-null and valid for `len` writable elements by contract.
    Ok(unsafe { std::slice::from_raw_parts_mut(p, len) })
}

/// Message of the last failed call on this thread, or null after a success.
/// The string stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn lexdiv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version, static string.
#[no_mangle]
pub extern "C" fn lexdiv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Spec with the customary defaults for `kind`.
#[no_mangle]
pub extern "C" fn lexdiv_index_spec_default(kind: LexdivIndexKind) -> LexdivIndexSpec {
    let spec = IndexSpec::new(kind.into());
    LexdivIndexSpec {
        kind,
        n: spec.n,
        s: spec.s,
        factor: spec.factor,
        maas_variant: LexdivMaasVariant::NaturalLogA,
        mtld_min_segment: spec.mtld_min_segment,
        seed: lexdiv::indices::DEFAULT_INDEX_SEED,
    }
}

/// Tokenizes `content` on whitespace.
///
/// # Safety
/// `id` and `content` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_text_new(
    id: *const c_char,
    content: *const c_char,
    preserve_case: bool,
    out: *mut *mut LexdivText,
) -> LexdivStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let case = if preserve_case {
            CasePolicy::Preserve
        } else {
            CasePolicy::Fold
        };
        let text = Text::from_whitespace(c_str(id, "id")?, c_str(content, "content")?, case)?;
        *out = Box::into_raw(Box::new(LexdivText(text)));
        Ok(())
    })
}

/// # Safety
/// `text` must come from [`lexdiv_text_new`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_text_free(text: *mut LexdivText) {
    if !text.is_null() {
        drop(Box::from_raw(text));
    }
}

/// Token and type counts.
///
/// # Safety
/// `text` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_text_counts(
    text: *const LexdivText,
    n_tokens: *mut usize,
    n_types: *mut usize,
) -> LexdivStatus {
    guard(|| {
        let t = &non_null(text, "text")?.0;
        *out_ptr(n_tokens, "n_tokens")? = t.len();
        *out_ptr(n_types, "n_types")? = t.n_types();
        Ok(())
    })
}

/// Scores a text. `undefined_factors` (may be null) is set for MTLD when no
/// factor was completed.
///
/// # Safety
/// Pointers must be valid; `undefined_factors` may be null.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_score(
    text: *const LexdivText,
    spec: *const LexdivIndexSpec,
    value: *mut f64,
    undefined_factors: *mut bool,
) -> LexdivStatus {
    guard(|| {
        let t = &non_null(text, "text")?.0;
        let spec = non_null(spec, "spec")?.to_spec();
        let value = out_ptr(value, "value")?;
        let score = spec.score(t.codes())?;
        *value = score.value;
        if !undefined_factors.is_null() {
            *undefined_factors = score.undefined_factors;
        }
        Ok(())
    })
}

/// Scores a sequence of type codes (equal codes are the same type).
///
/// # Safety
/// `codes` must hold `len` elements; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_score_codes(
    codes: *const u32,
    len: usize,
    spec: *const LexdivIndexSpec,
    value: *mut f64,
) -> LexdivStatus {
    guard(|| {
        let codes = slice(codes, len, "codes")?;
        let spec = non_null(spec, "spec")?.to_spec();
        *out_ptr(value, "value")? = spec.score(codes)?.value;
        Ok(())
    })
}

/// Per-position token weights of a windowed index, written to `out[0..n_tokens]`.
///
/// # Safety
/// `out` must have room for `n_tokens` values.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_token_weights(
    kind: LexdivIndexKind,
    n_tokens: usize,
    n: usize,
    out: *mut f64,
) -> LexdivStatus {
    guard(|| {
        let w = token_weights(kind.into(), n_tokens, n)?;
        slice_mut(out, n_tokens, "out")?.copy_from_slice(&w);
        Ok(())
    })
}

/// Probability that a type of frequency `f` in a text of `n_tokens` tokens
/// appears in a sample of `sample` tokens drawn without replacement.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_hypergeom_presence(n_tokens: u64, f: u64, sample: u64, out: *mut f64) -> LexdivStatus {
    guard(|| {
        *out_ptr(out, "out")? = hypergeom_presence(n_tokens, f, sample)?;
        Ok(())
    })
}

/// Empty corpus.
#[no_mangle]
pub extern "C" fn lexdiv_corpus_new() -> *mut LexdivCorpus {
    Box::into_raw(Box::new(LexdivCorpus(Corpus::default())))
}

/// Loads every token file of a directory; texts shorter than `min_length` are skipped.
///
/// # Safety
/// `dir` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_corpus_load(
    dir: *const c_char,
    preserve_case: bool,
    min_length: usize,
    out: *mut *mut LexdivCorpus,
) -> LexdivStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let case = if preserve_case {
            CasePolicy::Preserve
        } else {
            CasePolicy::Fold
        };
        let loaded = lexdiv::corpus::load_corpus(Path::new(c_str(dir, "dir")?), case, min_length)?;
        *out = Box::into_raw(Box::new(LexdivCorpus(loaded.corpus)));
        Ok(())
    })
}

/// Appends a copy of `text`. Fails on a duplicate id.
///
/// # Safety
/// Both handles must be live.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_corpus_add_text(corpus: *mut LexdivCorpus, text: *const LexdivText) -> LexdivStatus {
    guard(|| {
        let corpus = out_ptr(corpus, "corpus")?;
        let text = &non_null(text, "text")?.0;
        let mut texts = corpus.0.texts().to_vec();
        texts.push(text.clone());
        corpus.0 = Corpus::from_texts(texts)?;
        Ok(())
    })
}

/// # Safety
/// `corpus` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_corpus_len(corpus: *const LexdivCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `corpus` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_corpus_free(corpus: *mut LexdivCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Scores every text of `corpus` under one sampling method.
///
/// # Safety
/// Handles and config pointers must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_run_method(
    corpus: *const LexdivCorpus,
    config: *const LexdivSamplingConfig,
    spec: *const LexdivIndexSpec,
    out: *mut *mut LexdivScoreMatrix,
) -> LexdivStatus {
    guard(|| {
        let corpus = &non_null(corpus, "corpus")?.0;
        let c = non_null(config, "config")?;
        let spec = non_null(spec, "spec")?.to_spec();
        let out = out_ptr(out, "out")?;
        let method = match c.method {
            LexdivMethod::Parallel => Method::Parallel,
            LexdivMethod::Random => Method::Random,
            LexdivMethod::OrderedRandom => Method::OrderedRandom,
            LexdivMethod::Alternating => Method::Alternating,
        };
        let truncate = if c.truncate_to == 0 {
            corpus.min_text_len()
        } else {
            c.truncate_to
        };
        let divisors = slice(c.divisors, c.n_divisors, "divisors")?.to_vec();
        let sc = SamplingConfig::new(method, truncate)
            .with_conditions(Conditions::Divisors(divisors))
            .with_iterations(c.iterations)
            .with_seed(c.seed);
        *out = Box::into_raw(Box::new(LexdivScoreMatrix(run_method(corpus, &sc, &spec)?)));
        Ok(())
    })
}

/// Matrix from `n_rows * n_cols` row-major values; ids and labels are generated.
///
/// # Safety
/// `values` must hold `n_rows * n_cols` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_matrix_new(
    n_rows: usize,
    n_cols: usize,
    values: *const f64,
    out: *mut *mut LexdivScoreMatrix,
) -> LexdivStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let len = n_rows
            .checked_mul(n_cols)
            .ok_or_else(|| Failure::new(LexdivStatus::InvalidArgument, "matrix too large"))?;
        let v = slice(values, len, "values")?;
        let rows: Vec<Vec<f64>> = v.chunks(n_cols.max(1)).map(<[f64]>::to_vec).collect();
        *out = Box::into_raw(Box::new(LexdivScoreMatrix(ScoreMatrix::from_rows(&rows)?)));
        Ok(())
    })
}

/// # Safety
/// `m` must be a live handle; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_matrix_shape(
    m: *const LexdivScoreMatrix,
    n_rows: *mut usize,
    n_cols: *mut usize,
) -> LexdivStatus {
    guard(|| {
        let m = &non_null(m, "matrix")?.0;
        *out_ptr(n_rows, "n_rows")? = m.n_rows();
        *out_ptr(n_cols, "n_cols")? = m.n_cols();
        Ok(())
    })
}

/// Copies the row-major values into `out`, which holds `len` elements.
///
/// # Safety
/// `m` must be live; `out` must hold `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_matrix_values(m: *const LexdivScoreMatrix, out: *mut f64, len: usize) -> LexdivStatus {
    guard(|| {
        let m = &non_null(m, "matrix")?.0;
        if len != m.values().len() {
            return Err(Failure::new(
                LexdivStatus::InvalidArgument,
                format!("buffer holds {len} values, matrix has {}", m.values().len()),
            ));
        }
        slice_mut(out, len, "out")?.copy_from_slice(m.values());
        Ok(())
    })
}

/// Long-form `text_id,condition,score` CSV; free with [`lexdiv_string_free`].
///
/// # Safety
/// `m` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_matrix_to_csv(m: *const LexdivScoreMatrix, out: *mut *mut c_char) -> LexdivStatus {
    guard(|| {
        let m = &non_null(m, "matrix")?.0;
        let out = out_ptr(out, "out")?;
        let s = CString::new(m.to_csv_string())
            .map_err(|_| Failure::new(LexdivStatus::InvalidArgument, "csv contains NUL"))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `m` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_matrix_free(m: *mut LexdivScoreMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// ICC(2,1) with its 95% interval.
///
/// # Safety
/// `m` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_icc(m: *const LexdivScoreMatrix, mode: LexdivIccMode, out: *mut LexdivIcc) -> LexdivStatus {
    guard(|| {
        let m = &non_null(m, "matrix")?.0;
        let out = out_ptr(out, "out")?;
        let mode = match mode {
            LexdivIccMode::Agreement => IccMode::Agreement,
            LexdivIccMode::Consistency => IccMode::Consistency,
        };
        let r = icc_2_1(m, mode)?;
        *out = LexdivIcc {
            estimate: r.estimate,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
            ms_rows: r.ms_rows,
            ms_cols: r.ms_cols,
            ms_error: r.ms_error,
        };
        Ok(())
    })
}

/// One-way repeated-measures ANOVA over the columns.
///
/// # Safety
/// `m` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_rm_anova(m: *const LexdivScoreMatrix, out: *mut LexdivAnova) -> LexdivStatus {
    guard(|| {
        let m = &non_null(m, "matrix")?.0;
        let out = out_ptr(out, "out")?;
        let r = rm_anova(m)?;
        *out = LexdivAnova {
            f: r.f,
            df1: r.df1,
            df2: r.df2,
            p: r.p,
            partial_eta_sq: r.partial_eta_sq,
        };
        Ok(())
    })
}

/// Williams' t and Zou's 95% interval for r_jk − r_jh, which share variable j.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexdiv_compare_correlations(
    r_jk: f64,
    r_jh: f64,
    r_kh: f64,
    n: usize,
    out: *mut LexdivCorrTest,
) -> LexdivStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let t = steiger_t(r_jk, r_jh, r_kh, n)?;
        let (zou_low, zou_high) = zou_ci(r_jk, r_jh, r_kh, n, 0.05)?;
        *out = LexdivCorrTest {
            t: t.t,
            df: t.df,
            p: t.p,
            zou_low,
            zou_high,
        };
        Ok(())
    })
}
