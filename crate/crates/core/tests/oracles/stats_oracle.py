"""Reference values for the statistics fixtures in tests/common/mod.rs.

Run with: python3 stats_oracle.py
Uses pingouin for ICC and repeated-measures ANOVA, scipy for tails, and a
direct transcription of the Williams t and Zou interval formulas.
"""
import math

import numpy as np
import pandas as pd
import pingouin as pg
from scipy import stats

pg.options["round"] = None

ICC_FIXTURE = np.array([
    [9, 2, 5, 8],
    [6, 1, 3, 2],
    [8, 4, 6, 8],
    [7, 1, 2, 6],
    [10, 5, 6, 9],
    [6, 2, 4, 7],
], dtype=float)

ANOVA_FIXTURE = np.array([
    [0.71, 0.69, 0.66],
    [0.80, 0.78, 0.79],
    [0.62, 0.65, 0.58],
    [0.75, 0.70, 0.69],
    [0.90, 0.86, 0.85],
    [0.68, 0.66, 0.67],
    [0.77, 0.71, 0.70],
    [0.83, 0.84, 0.80],
])


def long_form(m):
    rows = []
    for i, row in enumerate(m):
        for j, v in enumerate(row):
            rows.append({"text": f"t{i}", "cond": f"c{j}", "score": v})
    return pd.DataFrame(rows)


def icc(m):
    """ICC point estimates from pingouin; CI recomputed unrounded with the same
    McGraw-Wong F-based formulas pingouin uses (pingouin rounds CI to 2 dp)."""
    res = pg.intraclass_corr(long_form(m), targets="text", raters="cond", ratings="score")
    res = res.set_index("Type")
    n, k = m.shape
    grand = m.mean()
    ss_rows = k * ((m.mean(axis=1) - grand) ** 2).sum()
    ss_cols = n * ((m.mean(axis=0) - grand) ** 2).sum()
    ss_err = ((m - grand) ** 2).sum() - ss_rows - ss_cols
    msb = ss_rows / (n - 1)
    msj = ss_cols / (k - 1)
    mse = ss_err / ((n - 1) * (k - 1))
    alpha = 0.05
    df1, df2kd = n - 1, (n - 1) * (k - 1)
    icc3 = (msb - mse) / (msb + (k - 1) * mse)
    f3k = msb / mse
    f3l = f3k / stats.f.ppf(1 - alpha / 2, df1, df2kd)
    f3u = f3k * stats.f.ppf(1 - alpha / 2, df2kd, df1)
    l3 = (f3l - 1) / (f3l + (k - 1))
    u3 = (f3u - 1) / (f3u + (k - 1))
    icc2 = (msb - mse) / (msb + (k - 1) * mse + k * (msj - mse) / n)
    fj = msj / mse
    vn = df2kd * (k * icc2 * fj + n * (1 + (k - 1) * icc2) - k * icc2) ** 2
    vd = df1 * k**2 * icc2**2 * fj**2 + (n * (1 + (k - 1) * icc2) - k * icc2) ** 2
    v = vn / vd
    f2u = stats.f.ppf(1 - alpha / 2, n - 1, v)
    f2l = stats.f.ppf(1 - alpha / 2, v, n - 1)
    l2 = n * (msb - f2u * mse) / (f2u * (k * msj + (k * n - k - n) * mse) + n * msb)
    u2 = n * (f2l * msb - mse) / (k * msj + (k * n - k - n) * mse + n * f2l * msb)
    assert abs(icc2 - res.loc["ICC(A,1)", "ICC"]) < 1e-12
    assert abs(icc3 - res.loc["ICC(C,1)", "ICC"]) < 1e-12
    print("ms rows/cols/err", repr(msb), repr(msj), repr(mse))
    print("agreement", repr(icc2), repr(l2), repr(u2))
    print("consistency", repr(icc3), repr(l3), repr(u3))


def anova(m):
    res = pg.rm_anova(long_form(m), dv="score", within="cond", subject="text", detailed=True)
    print(res[["Source", "SS", "DF", "F", "p_unc"]].to_string())
    ss_cond, ss_err = res.loc[0, "SS"], res.loc[1, "SS"]
    print("F", repr(res.loc[0, "F"]), "p", repr(res.loc[0, "p_unc"]),
          "np2", repr(ss_cond / (ss_cond + ss_err)))


def williams_t(rjk, rjh, rkh, n):
    det = 1 - rjk**2 - rjh**2 - rkh**2 + 2 * rjk * rjh * rkh
    rbar = (rjk + rjh) / 2
    t = (rjk - rjh) * math.sqrt((n - 1) * (1 + rkh) /
                                (2 * ((n - 1) / (n - 3)) * det + rbar**2 * (1 - rkh)**3))
    df = n - 3
    return t, df, 2 * stats.t.sf(abs(t), df)


def zou(r12, r13, r23, n, alpha=0.05):
    z = stats.norm.ppf(1 - alpha / 2)
    def ci(r):
        zr = math.atanh(r)
        h = z / math.sqrt(n - 3)
        return math.tanh(zr - h), math.tanh(zr + h)
    l1, u1 = ci(r12)
    l2, u2 = ci(r13)
    c = ((r23 - 0.5 * r12 * r13) * (1 - r12**2 - r13**2 - r23**2) + r23**3) / \
        ((1 - r12**2) * (1 - r13**2))
    d = r12 - r13
    low = d - math.sqrt((r12 - l1)**2 + (u2 - r13)**2 - 2 * c * (r12 - l1) * (u2 - r13))
    high = d + math.sqrt((u1 - r12)**2 + (r13 - l2)**2 - 2 * c * (u1 - r12) * (r13 - l2))
    return low, high


if __name__ == "__main__":
    print("== ICC 6x4")
    icc(ICC_FIXTURE)
    print("== ICC anova fixture")
    icc(ANOVA_FIXTURE)
    print("== RM-ANOVA 6x4")
    anova(ICC_FIXTURE)
    print("== RM-ANOVA 8x3")
    anova(ANOVA_FIXTURE)
    for triple in ((0.342, 0.285, 0.88, 188), (0.515, 0.480, 0.93, 223), (0.45, 0.21, 0.35, 60)):
        print("== williams/zou", triple)
        print(*map(repr, williams_t(*triple)))
        print(*map(repr, zou(*triple)))
    x = [2.1, 3.4, 1.9, 5.6, 4.4, 3.3, 2.8]
    y = [1.0, 2.2, 1.4, 4.1, 3.9, 2.0, 2.9]
    print("== pearson", repr(stats.pearsonr(x, y)[0]))
    print("== tails")
    print("t 3.18 185", repr(2 * stats.t.sf(3.18, 185)))
    print("t 1.45 185", repr(2 * stats.t.sf(1.45, 185)))
    print("F 3.83 3 187", repr(stats.f.sf(3.83, 3, 187)))
    print("F 0.44 3 561", repr(stats.f.sf(0.44, 3, 561)))
    print("F 2.5 4 9.5", repr(stats.f.sf(2.5, 4, 9.5)))
    print("beta 0.3 2 5", repr(stats.beta.cdf(0.3, 2, 5)))
    print("beta 0.42 3.7 11.2", repr(stats.beta.cdf(0.42, 3.7, 11.2)))
    print("beta 0.97 92.5 0.5", repr(stats.beta.cdf(0.97, 92.5, 0.5)))
    print("F ppf 0.975 5 15", repr(stats.f.ppf(0.975, 5, 15)))
    print("F ppf 0.975 3.3 187", repr(stats.f.ppf(0.975, 3.3, 187)))
    print("norm ppf 0.975", repr(stats.norm.ppf(0.975)), "0.995", repr(stats.norm.ppf(0.995)))
