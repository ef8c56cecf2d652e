//! ICC(2,1), repeated-measures ANOVA and tests on dependent correlations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LexdivError, Result};
use crate::matrix::ScoreMatrix;
use crate::numerics::{f_quantile, f_sf, normal_quantile, t_sf_two_sided, CompensatedSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IccMode {
    Agreement,
    Consistency,
}

impl fmt::Display for IccMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IccMode::Agreement => "agreement",
            IccMode::Consistency => "consistency",
        })
    }
}

impl FromStr for IccMode {
    type Err = LexdivError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "agreement" | "a" => Ok(IccMode::Agreement),
            "consistency" | "c" => Ok(IccMode::Consistency),
            other => Err(LexdivError::invalid(format!("unknown ICC mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IccResult {
    pub mode: IccMode,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub ms_rows: f64,
    pub ms_cols: f64,
    pub ms_error: f64,
    pub n_rows: usize,
    pub n_cols: usize,
}

/// Two-way ANOVA mean squares of a complete matrix.
struct TwoWay {
    n: usize,
    k: usize,
    ss_rows: f64,
    ss_cols: f64,
    ss_error: f64,
    col_means: Vec<f64>,
}

impl TwoWay {
    fn new(m: &ScoreMatrix) -> Result<Self> {
        let (n, k) = (m.n_rows(), m.n_cols());
        if n < 2 || k < 2 {
            return Err(LexdivError::Stats(format!(
                "need at least 2 rows and 2 columns, got {n} x {k}"
            )));
        }
        let grand = m.values().iter().copied().collect::<CompensatedSum>().total() / (n * k) as f64;
        let row_means: Vec<f64> = (0..n)
            .map(|i| m.row(i).iter().copied().collect::<CompensatedSum>().total() / k as f64)
            .collect();
        let col_means: Vec<f64> = (0..k)
            .map(|j| m.column(j).into_iter().collect::<CompensatedSum>().total() / n as f64)
            .collect();
        let ss_rows = k as f64 * row_means.iter().map(|r| (r - grand).powi(2)).collect::<CompensatedSum>().total();
        let ss_cols = n as f64 * col_means.iter().map(|c| (c - grand).powi(2)).collect::<CompensatedSum>().total();
        let mut ss_error = CompensatedSum::new();
        for (i, rm) in row_means.iter().enumerate() {
            for (j, cm) in col_means.iter().enumerate() {
                ss_error.add((m.get(i, j) - rm - cm + grand).powi(2));
            }
        }
        Ok(TwoWay {
            n,
            k,
            ss_rows,
            ss_cols,
            ss_error: ss_error.total(),
            col_means,
        })
    }

    fn df_error(&self) -> f64 {
        ((self.n - 1) * (self.k - 1)) as f64
    }

    fn ms_rows(&self) -> f64 {
        self.ss_rows / (self.n - 1) as f64
    }

    fn ms_cols(&self) -> f64 {
        self.ss_cols / (self.k - 1) as f64
    }

    fn ms_error(&self) -> f64 {
        self.ss_error / self.df_error()
    }
}

/// Two-way random-effects, single-measure intraclass correlation with a 95%
/// F-based confidence interval.
pub fn icc_2_1(m: &ScoreMatrix, mode: IccMode) -> Result<IccResult> {
    let tw = TwoWay::new(m)?;
    let (n, k) = (tw.n as f64, tw.k as f64);
    let (msr, msc, mse) = (tw.ms_rows(), tw.ms_cols(), tw.ms_error());
    // Relative tolerance for deciding that a variance component vanished.
    let scale = m.values().iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let tiny = scale * scale * 1e-24;
    if msr <= tiny {
        return Err(LexdivError::Stats("no between-text variance".into()));
    }
    let result = |estimate: f64, lo: f64, hi: f64| IccResult {
        mode,
        estimate,
        ci_low: lo.min(estimate),
        ci_high: hi.max(estimate).min(1.0),
        ms_rows: msr,
        ms_cols: msc,
        ms_error: mse,
        n_rows: tw.n,
        n_cols: tw.k,
    };
    let df1 = n - 1.0;
    let df2 = tw.df_error();
    match mode {
        IccMode::Consistency => {
            if mse <= tiny {
                return Ok(result(1.0, 1.0, 1.0));
            }
            let est = (msr - mse) / (msr + (k - 1.0) * mse);
            let f = msr / mse;
            let fl = f / f_quantile(0.975, df1, df2)?;
            let fu = f * f_quantile(0.975, df2, df1)?;
            Ok(result(est, (fl - 1.0) / (fl + k - 1.0), (fu - 1.0) / (fu + k - 1.0)))
        }
        IccMode::Agreement => {
            if mse <= tiny && msc <= tiny {
                return Ok(result(1.0, 1.0, 1.0));
            }
            let r = (msr - mse) / (msr + (k - 1.0) * mse + k * (msc - mse) / n);
            let v = if mse <= tiny {
                k - 1.0
            } else {
                let fj = msc / mse;
                let a = n * (1.0 + (k - 1.0) * r) - k * r;
                let vn = (k - 1.0) * (n - 1.0) * (k * r * fj + a).powi(2);
                let vd = (n - 1.0) * k * k * r * r * fj * fj + a * a;
                vn / vd
            };
            let fl = f_quantile(0.975, df1, v)?;
            let fu = f_quantile(0.975, v, df1)?;
            let c = k * msc + (k * n - k - n) * mse;
            let lo = n * (msr - fl * mse) / (fl * c + n * msr);
            let hi = n * (fu * msr - mse) / (c + n * fu * msr);
            Ok(result(r, lo, hi))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    #[serde(rename = "F")]
    pub f: f64,
    pub df1: usize,
    pub df2: usize,
    pub p: f64,
    pub partial_eta_sq: f64,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

/// One-way repeated-measures ANOVA over the columns, without sphericity
/// correction.
pub fn rm_anova(m: &ScoreMatrix) -> Result<AnovaResult> {
    if m.n_cols() < 2 {
        return Err(LexdivError::Stats("at least 2 conditions are required".into()));
    }
    let tw = TwoWay::new(m)?;
    let df1 = tw.k - 1;
    let df2 = (tw.k - 1) * (tw.n - 1);
    let scale = m.values().iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let tiny = scale * scale * 1e-24;
    let (ss_cond, ss_err) = (tw.ss_cols, tw.ss_error);
    let (f, p, eta) = if ss_cond <= tiny {
        (0.0, 1.0, 0.0)
    } else if ss_err <= tiny {
        (f64::INFINITY, 0.0, 1.0)
    } else {
        let f = tw.ms_cols() / tw.ms_error();
        (f, f_sf(f, df1 as f64, df2 as f64)?, ss_cond / (ss_cond + ss_err))
    };
    let sds = (0..tw.k)
        .map(|j| {
            let mean = tw.col_means[j];
            let ss: CompensatedSum = m.column(j).into_iter().map(|x| (x - mean).powi(2)).collect();
            (ss.total() / (tw.n - 1) as f64).sqrt()
        })
        .collect();
    Ok(AnovaResult {
        f,
        df1,
        df2,
        p,
        partial_eta_sq: eta,
        means: tw.col_means,
        sds,
    })
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(LexdivError::Stats(format!(
            "vectors differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(LexdivError::Stats("correlation needs at least 3 pairs".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().copied().collect::<CompensatedSum>().total() / n;
    let my = y.iter().copied().collect::<CompensatedSum>().total() / n;
    let (mut sxy, mut sxx, mut syy) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy.add(dx * dy);
        sxx.add(dx * dx);
        syy.add(dy * dy);
    }
    if sxx.total() == 0.0 || syy.total() == 0.0 {
        return Err(LexdivError::Stats("zero variance".into()));
    }
    Ok((sxy.total() / (sxx.total().sqrt() * syy.total().sqrt())).clamp(-1.0, 1.0))
}

/// Reliability of a two-rater composite.
pub fn spearman_brown(r: f64) -> Result<f64> {
    if !(r > -1.0 && r <= 1.0) {
        return Err(LexdivError::Stats(format!("correlation {r} outside (-1, 1]")));
    }
    Ok(2.0 * r / (1.0 + r))
}

fn check_triple(r_jk: f64, r_jh: f64, r_kh: f64, n: usize) -> Result<()> {
    if n < 4 {
        return Err(LexdivError::Stats(format!("n = {n} is below 4")));
    }
    for r in [r_jk, r_jh, r_kh] {
        if !(r.abs() < 1.0) {
            return Err(LexdivError::Stats(format!("correlation {r} is not inside (-1, 1)")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub df: usize,
    pub p: f64,
}

/// Williams' t for r_jk versus r_jh, two correlations sharing variable j.
pub fn steiger_t(r_jk: f64, r_jh: f64, r_kh: f64, n: usize) -> Result<TTest> {
    check_triple(r_jk, r_jh, r_kh, n)?;
    let nf = n as f64;
    let det = 1.0 - r_jk * r_jk - r_jh * r_jh - r_kh * r_kh + 2.0 * r_jk * r_jh * r_kh;
    let rbar = (r_jk + r_jh) / 2.0;
    let denom = 2.0 * ((nf - 1.0) / (nf - 3.0)) * det + rbar * rbar * (1.0 - r_kh).powi(3);
    if !(det > 0.0) || !(denom > 0.0) {
        return Err(LexdivError::Stats(
            "correlation matrix is degenerate; Williams' t is undefined".into(),
        ));
    }
    let t = (r_jk - r_jh) * ((nf - 1.0) * (1.0 + r_kh) / denom).sqrt();
    let df = n - 3;
    Ok(TTest {
        t,
        df,
        p: t_sf_two_sided(t, df as f64)?,
    })
}

/// Confidence interval for r_jk − r_jh (overlapping correlations) by Zou's
/// method of recovering variance estimates from Fisher-z intervals.
pub fn zou_ci(r_jk: f64, r_jh: f64, r_kh: f64, n: usize, alpha: f64) -> Result<(f64, f64)> {
    check_triple(r_jk, r_jh, r_kh, n)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(LexdivError::Stats(format!("alpha {alpha} outside (0, 1)")));
    }
    let det = 1.0 - r_jk * r_jk - r_jh * r_jh - r_kh * r_kh + 2.0 * r_jk * r_jh * r_kh;
    if !(det > 0.0) {
        return Err(LexdivError::Stats("correlation matrix is degenerate".into()));
    }
    let z = normal_quantile(1.0 - alpha / 2.0)?;
    let half = z / ((n as f64) - 3.0).sqrt();
    let bounds = |r: f64| ((r.atanh() - half).tanh(), (r.atanh() + half).tanh());
    let (l1, u1) = bounds(r_jk);
    let (l2, u2) = bounds(r_jh);
    let c = ((r_kh - 0.5 * r_jk * r_jh) * (1.0 - r_jk * r_jk - r_jh * r_jh - r_kh * r_kh) + r_kh.powi(3))
        / ((1.0 - r_jk * r_jk) * (1.0 - r_jh * r_jh));
    let d = r_jk - r_jh;
    let lo = d
        - ((r_jk - l1).powi(2) + (u2 - r_jh).powi(2) - 2.0 * c * (r_jk - l1) * (u2 - r_jh)).sqrt();
    let hi = d
        + ((u1 - r_jk).powi(2) + (r_jh - l2).powi(2) - 2.0 * c * (u1 - r_jk) * (r_jh - l2)).sqrt();
    Ok((lo, hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrComparison {
    pub r_large: f64,
    pub r_small: f64,
    pub r_between: f64,
    pub n: usize,
    pub t: f64,
    pub df: usize,
    pub p: f64,
    pub zou_low: f64,
    pub zou_high: f64,
}

/// Compares the correlations of an external criterion with the scores at two
/// conditions (the shared variable j is the criterion).
pub fn compare_correlations(criterion: &[f64], large: &[f64], small: &[f64]) -> Result<CorrComparison> {
    let r_large = pearson(criterion, large)?;
    let r_small = pearson(criterion, small)?;
    let r_between = pearson(large, small)?;
    let n = criterion.len();
    let t = steiger_t(r_large, r_small, r_between, n)?;
    let (zou_low, zou_high) = zou_ci(r_large, r_small, r_between, n, 0.05)?;
    Ok(CorrComparison {
        r_large,
        r_small,
        r_between,
        n,
        t: t.t,
        df: t.df,
        p: t.p,
        zou_low,
        zou_high,
    })
}
