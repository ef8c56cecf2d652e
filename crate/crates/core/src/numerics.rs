//! Combinatorics and distribution tails.
//!
//! Everything here is a pure function over `f64`/`u64`. Tail probabilities
//! go through a continued-fraction regularized incomplete beta; binomial
//! coefficients are handled on the log scale.

#![allow(clippy::excessive_precision)]

use crate::error::{LexdivError, Result};

const CF_EPS: f64 = 1e-12;
const CF_MAX_ITER: usize = 500;
const FPMIN: f64 = 1e-300;

/// A nonnegative quantity stored as its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogReal(f64);

impl LogReal {
    pub fn from_ln(value: f64) -> Self {
        LogReal(value)
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn exp(self) -> f64 {
        self.0.exp()
    }
}

/// Running sum with Neumaier compensation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated mean of a slice; `NaN` for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().copied().collect::<CompensatedSum>().total() / values.len() as f64
}

/// ln Γ(x) for x > 0 (Lanczos, 14 terms).
pub fn ln_gamma(x: f64) -> f64 {
    const COF: [f64; 14] = [
        57.156_235_665_862_92,
        -59.597_960_355_475_49,
        14.136_097_974_741_747,
        -0.491_913_816_097_620_2,
        0.339_946_499_848_118_9e-4,
        0.465_236_289_270_485_8e-4,
        -0.983_744_753_048_795_6e-4,
        0.158_088_703_224_912_5e-3,
        -0.210_264_441_724_104_9e-3,
        0.217_439_618_115_212_6e-3,
        -0.164_318_106_536_763_9e-3,
        0.844_182_239_838_527_4e-4,
        -0.261_908_384_015_814_1e-4,
        0.368_991_826_595_316_2e-5,
    ];
    debug_assert!(x > 0.0);
    let mut y = x;
    let tmp = x + 671.0 / 128.0;
    let tmp = (x + 0.5) * tmp.ln() - tmp;
    let mut ser = 0.999_999_999_999_997_1;
    for c in COF {
        y += 1.0;
        ser += c / y;
    }
    tmp + (2.506_628_274_631_000_5 * ser / x).ln()
}

/// Stirling-series remainder ln(k!) - [(k+1/2)ln k - k + ln√(2π)], valid for k > 100.
fn stirling_remainder(k: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let k2 = k * k;
    (S0 - (S1 - (S2 - (S3 - S4 / k2) / k2) / k2) / k2) / k
}

/// ln C(n, k).
pub fn log_binomial(n: u64, k: u64) -> Result<LogReal> {
    if k > n {
        return Err(LexdivError::invalid(format!(
            "log_binomial: k={k} outside 0..={n}"
        )));
    }
    let small = k.min(n - k);
    if small == 0 {
        return Ok(LogReal(0.0));
    }
    let nf = n as f64;
    if small <= 100 {
        // exact product form, one term per factor
        let base = (n - small) as f64;
        let s: CompensatedSum = (1..=small)
            .map(|i| ((base + i as f64) / i as f64).ln())
            .collect();
        return Ok(LogReal(s.total()));
    }
    // Every term below is nonnegative, so there is no catastrophic cancellation.
    let kf = k as f64;
    let rest = (n - k) as f64;
    let value = kf * (nf / kf).ln() - rest * (-kf / nf).ln_1p()
        + 0.5 * (nf / (2.0 * std::f64::consts::PI * kf * rest)).ln()
        + stirling_remainder(nf)
        - stirling_remainder(kf)
        - stirling_remainder(rest);
    Ok(LogReal(value))
}

/// Probability that a type occurring `f` times in a text of `n_tokens` tokens
/// shows up at least once in a sample of `sample` tokens drawn without
/// replacement: 1 - C(N-f, n) / C(N, n).
pub fn hypergeom_presence(n_tokens: u64, f: u64, sample: u64) -> Result<f64> {
    if f < 1 || f > n_tokens {
        return Err(LexdivError::invalid(format!(
            "hypergeom_presence: frequency {f} outside 1..={n_tokens}"
        )));
    }
    if sample > n_tokens {
        return Err(LexdivError::invalid(format!(
            "hypergeom_presence: sample {sample} exceeds {n_tokens} tokens"
        )));
    }
    if sample > n_tokens - f {
        return Ok(1.0);
    }
    let nf = n_tokens as f64;
    let sf = sample as f64;
    if f == 1 {
        return Ok(sf / nf);
    }
    // absence = prod_{i<f} (N-n-i)/(N-i). Every factor is a correctly rounded
    // quotient that shrinks as n or f grows, so 1 - absence is monotone in both.
    let mut absent = 1.0;
    for i in 0..f {
        let remaining = nf - i as f64;
        absent *= (remaining - sf) / remaining;
    }
    Ok(1.0 - absent)
}

fn beta_continued_fraction(x: f64, a: f64, b: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            return Ok(h);
        }
    }
    Err(LexdivError::invalid(format!(
        "incomplete beta did not converge for x={x}, a={a}, b={b}"
    )))
}

/// Regularized incomplete beta I_x(a, b).
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || !(a > 0.0) || !(b > 0.0) {
        return Err(LexdivError::invalid(format!(
            "reg_inc_beta: domain violation x={x}, a={a}, b={b}"
        )));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(x);
    }
    let front = (ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (-x).ln_1p()).exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(front * beta_continued_fraction(x, a, b)? / a)
    } else {
        Ok(1.0 - front * beta_continued_fraction(1.0 - x, b, a)? / b)
    }
}

/// Two-sided Student t tail probability P(|T| ≥ |t|).
pub fn t_sf_two_sided(t: f64, df: f64) -> Result<f64> {
    if !(df > 0.0) {
        return Err(LexdivError::invalid(format!("t tail: df={df} must be positive")));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    let p = reg_inc_beta(df / (df + t * t), 0.5 * df, 0.5)?;
    Ok(p.clamp(0.0, 1.0))
}

/// Upper tail P(F ≥ f) of the F distribution.
pub fn f_sf(f: f64, df1: f64, df2: f64) -> Result<f64> {
    if !(f >= 0.0) || !(df1 > 0.0) || !(df2 > 0.0) {
        return Err(LexdivError::invalid(format!(
            "F tail: domain violation F={f}, df1={df1}, df2={df2}"
        )));
    }
    if f.is_infinite() {
        return Ok(0.0);
    }
    let p = reg_inc_beta(df2 / (df2 + df1 * f), 0.5 * df2, 0.5 * df1)?;
    Ok(p.clamp(0.0, 1.0))
}

/// Quantile of the F distribution: the `f` with P(F ≤ f) = `p`.
pub fn f_quantile(p: f64, df1: f64, df2: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) || !(df1 > 0.0) || !(df2 > 0.0) {
        return Err(LexdivError::invalid(format!(
            "F quantile: domain violation p={p}, df1={df1}, df2={df2}"
        )));
    }
    // Upper tail is I_y(df2/2, df1/2) with y = df2/(df2 + df1 F), decreasing in F.
    // Bisect on y, which stays well scaled when F is large.
    let target = 1.0 - p;
    let (a, b) = (0.5 * df2, 0.5 * df1);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if reg_inc_beta(mid, a, b)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    let y = 0.5 * (lo + hi);
    Ok(df2 * (1.0 - y) / (df1 * y))
}

/// Upper regularized incomplete gamma Q(a, x).
fn reg_gamma_upper(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let gln = ln_gamma(a);
    let prefactor = (-x + a * x.ln() - gln).exp();
    if x < a + 1.0 {
        let mut ap = a;
        let mut del = 1.0 / a;
        let mut sum = del;
        for _ in 0..1000 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        1.0 - sum * prefactor
    } else {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < FPMIN {
                d = FPMIN;
            }
            c = b + an / c;
            if c.abs() < FPMIN {
                c = FPMIN;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        prefactor * h
    }
}

fn erfc(z: f64) -> f64 {
    if z >= 0.0 {
        reg_gamma_upper(0.5, z * z)
    } else {
        2.0 - reg_gamma_upper(0.5, z * z)
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile (Acklam's rational approximation plus one Halley step).
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(LexdivError::invalid(format!(
            "normal quantile: p={p} outside (0, 1)"
        )));
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;
    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (-p).ln_1p()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let e = normal_cdf(x) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    Ok(x - u / (1.0 + 0.5 * x * u))
}

/// Fisher's z transform, atanh(r).
pub fn fisher_z(r: f64) -> Result<f64> {
    if !(r.abs() < 1.0) {
        return Err(LexdivError::invalid(format!(
            "fisher_z: |r| must be < 1, got {r}"
        )));
    }
    Ok(r.signum() * r.abs().atanh())
}
