"""Statistical machinery: two-sample tests, KS tests, independence probes,
scaling regressions, and the reproducible test report record.

Conventions: significance levels default to 1e-3 per test, discrete
two-sample comparisons report both total-variation distance and a pooled
chi-square p-value, and every report carries the seeds needed to reproduce
it bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats as sps

from .rng import RngStream


@dataclass
class TestReport:
    test_id: str
    statistic: float
    threshold: float
    passed: bool
    sample_sizes: tuple = ()
    seeds: tuple = ()
    detail: dict = field(default_factory=dict)

    def to_json(self) -> str:
        d = {
            "test_id": self.test_id,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "passed": bool(self.passed),
            "sample_sizes": list(self.sample_sizes),
            "seeds": list(self.seeds),
            "detail": self.detail,
        }
        return json.dumps(d, sort_keys=True)


# --- discrete two-sample -------------------------------------------------------

def tv_distance(counts_a: dict, counts_b: dict) -> float:
    na = sum(counts_a.values())
    nb = sum(counts_b.values())
    if na == 0 or nb == 0:
        raise ValueError("empty sample")
    keys = set(counts_a) | set(counts_b)
    return 0.5 * sum(abs(counts_a.get(k, 0) / na - counts_b.get(k, 0) / nb)
                     for k in keys)


def tv_to_exact(counts: dict, exact: dict) -> float:
    n = sum(counts.values())
    keys = set(counts) | set(exact)
    return 0.5 * sum(abs(counts.get(k, 0) / n - exact.get(k, 0.0)) for k in keys)


def chi2_two_sample(counts_a: dict, counts_b: dict, min_expected: float = 5.0
                    ) -> tuple[float, float]:
    """Pooled-support two-sample chi-square; cells with small pooled
    expectation are merged into one bucket.  Returns (statistic, p-value)."""
    na = sum(counts_a.values())
    nb = sum(counts_b.values())
    keys = sorted(set(counts_a) | set(counts_b), key=repr)
    pooled = {k: counts_a.get(k, 0) + counts_b.get(k, 0) for k in keys}
    cells = []
    rest_a = rest_b = 0
    for k in keys:
        exp_a = na * pooled[k] / (na + nb)
        exp_b = nb * pooled[k] / (na + nb)
        if min(exp_a, exp_b) >= min_expected:
            cells.append((counts_a.get(k, 0), counts_b.get(k, 0)))
        else:
            rest_a += counts_a.get(k, 0)
            rest_b += counts_b.get(k, 0)
    if rest_a + rest_b > 0:
        cells.append((rest_a, rest_b))
    if len(cells) < 2:
        return 0.0, 1.0
    stat = 0.0
    for ca, cb in cells:
        tot = ca + cb
        ea = na * tot / (na + nb)
        eb = nb * tot / (na + nb)
        stat += (ca - ea) ** 2 / ea + (cb - eb) ** 2 / eb
    dof = len(cells) - 1
    return stat, float(sps.chi2.sf(stat, dof))


def chi2_to_exact(counts: dict, exact: dict, min_expected: float = 5.0
                  ) -> tuple[float, float]:
    """One-sample chi-square of counts against an exact discrete law."""
    n = sum(counts.values())
    keys = sorted(exact, key=repr)
    cells = []
    rest_o = 0
    rest_p = 0.0
    for k in keys:
        if n * exact[k] >= min_expected:
            cells.append((counts.get(k, 0), exact[k]))
        else:
            rest_o += counts.get(k, 0)
            rest_p += exact[k]
    if rest_p > 0:
        cells.append((rest_o, rest_p))
    stat = sum((o - n * pr) ** 2 / (n * pr) for o, pr in cells if pr > 0)
    dof = max(len(cells) - 1, 1)
    return stat, float(sps.chi2.sf(stat, dof))


def discrete_two_sample(counts_a: dict, counts_b: dict, tv_threshold: float,
                        test_id: str = "two-sample", level: float = 1e-3,
                        seeds: tuple = ()) -> TestReport:
    tv = tv_distance(counts_a, counts_b)
    stat, pval = chi2_two_sample(counts_a, counts_b)
    passed = tv < tv_threshold and pval > level
    return TestReport(
        test_id, tv, tv_threshold, passed,
        sample_sizes=(sum(counts_a.values()), sum(counts_b.values())),
        seeds=seeds,
        detail={"chi2": stat, "chi2_pvalue": pval, "level": level},
    )


def bootstrap_tv_threshold(counts_a: dict, counts_b: dict, rng: RngStream,
                           level: float = 0.999, resamples: int = 1000) -> float:
    """Null TV quantile via parametric bootstrap from the pooled sample.

    Draws resample pairs from the pooled empirical law at the original
    sample sizes and returns the requested TV quantile; used to calibrate
    two-sample thresholds on discrete supports where asymptotic chi-square
    is unreliable.
    """
    na = sum(counts_a.values())
    nb = sum(counts_b.values())
    keys = list(set(counts_a) | set(counts_b))
    pooled = np.array([counts_a.get(k, 0) + counts_b.get(k, 0) for k in keys],
                      dtype=float)
    pooled /= pooled.sum()
    g = rng.generator
    tvs = np.empty(resamples)
    for r in range(resamples):
        sa = g.multinomial(na, pooled)
        sb = g.multinomial(nb, pooled)
        tvs[r] = 0.5 * np.abs(sa / na - sb / nb).sum()
    return float(np.quantile(tvs, level))


# --- Kolmogorov-Smirnov --------------------------------------------------------

def ks_statistic(samples: np.ndarray, cdf) -> float:
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    if n == 0:
        raise ValueError("empty sample")
    f = cdf(x)
    up = np.arange(1, n + 1) / n - f
    down = f - np.arange(0, n) / n
    return float(max(up.max(), down.max()))


def ks_critical(n: int, level: float) -> float:
    """Asymptotic critical value: reject at ``level`` when D exceeds it."""
    return float(special.kolmogi(level)) / math.sqrt(n)


def ks_one_sample(samples: np.ndarray, cdf, test_id: str = "ks",
                  level: float = 1e-3, seeds: tuple = ()) -> TestReport:
    d = ks_statistic(samples, cdf)
    crit = ks_critical(len(samples), level)
    return TestReport(
        test_id, d, crit, d < crit,
        sample_sizes=(len(samples),), seeds=seeds,
        detail={"level": level,
                "crit_1e-2": ks_critical(len(samples), 1e-2)},
    )


def ks_statistic_lattice(samples: np.ndarray, cdf, spacing: float) -> float:
    """KS-type distance of a lattice variable from a continuous law.

    A lattice variable keeps a point mass ~ density * spacing against any
    continuous CDF, so the plain sup distance never vanishes.  Comparing
    the empirical CDF at the atoms against the CDF at half-spacing offsets
    (continuity correction) removes the discretization artifact and leaves
    the DKW-scale sampling noise, which the usual critical values bound
    conservatively.
    """
    x = np.asarray(samples, dtype=float)
    n = len(x)
    atoms, counts = np.unique(x, return_counts=True)
    emp = np.cumsum(counts) / n
    return float(np.abs(emp - cdf(atoms + 0.5 * spacing)).max())


# --- independence --------------------------------------------------------------

def pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc = x - x.mean()
    yc = y - y.mean()
    return float(np.dot(xc, yc) / math.sqrt(np.dot(xc, xc) * np.dot(yc, yc)))


def permutation_pvalue(x: np.ndarray, y: np.ndarray, rng: RngStream,
                       rounds: int = 200) -> float:
    r0 = abs(pearson_r(x, y))
    g = rng.generator
    hits = 0
    for _ in range(rounds):
        if abs(pearson_r(x, g.permutation(y))) >= r0:
            hits += 1
    return (hits + 1) / (rounds + 1)


def independence_suite(x: np.ndarray, y: np.ndarray, rng: RngStream,
                       test_id: str = "independence", r_bound: float | None = None,
                       seeds: tuple = ()) -> TestReport:
    """Pearson correlation on raw and log scale plus a permutation p-value.

    Passes when |r| stays below ``r_bound`` (default 5/sqrt(N)) on both
    scales.  Log scale requires positive samples.
    """
    n = len(x)
    bound = 5.0 / math.sqrt(n) if r_bound is None else r_bound
    r_raw = pearson_r(x, y)
    r_log = pearson_r(np.log(x), np.log(y)) if np.all(x > 0) and np.all(y > 0) \
        else r_raw
    p_perm = permutation_pvalue(np.asarray(x), np.asarray(y), rng)
    stat = max(abs(r_raw), abs(r_log))
    return TestReport(
        test_id, stat, bound, stat < bound,
        sample_sizes=(n,), seeds=seeds,
        detail={"r_raw": r_raw, "r_log": r_log, "perm_pvalue": p_perm},
    )


# --- scaling-exponent regression ------------------------------------------------

def scaling_exponent(series, rng: RngStream | None = None,
                     bootstrap: int = 200) -> dict:
    """Least-squares slope of log spread against log n with a bootstrap CI.

    ``series`` is a list of (n, samples) pairs; the spread of each sample
    set is its standard deviation.  Returns slope, intercept, and a
    bootstrap confidence interval when a stream is supplied.
    """
    if len(series) < 4:
        raise ValueError("need at least 4 sizes for a slope estimate")
    ns = np.array([float(n) for n, _ in series])
    spreads = np.array([float(np.std(np.asarray(s, dtype=float))) for _, s in series])
    if np.any(spreads <= 0):
        return {"slope": 0.0, "intercept": float(np.log(max(spreads.max(), 1e-300))),
                "ci": (0.0, 0.0)}
    slope, intercept = np.polyfit(np.log(ns), np.log(spreads), 1)
    ci = None
    if rng is not None:
        g = rng.generator
        slopes = np.empty(bootstrap)
        data = [np.asarray(s, dtype=float) for _, s in series]
        for r in range(bootstrap):
            sp = [np.std(d[g.integers(0, len(d), len(d))]) for d in data]
            slopes[r] = np.polyfit(np.log(ns), np.log(sp), 1)[0]
        ci = (float(np.quantile(slopes, 0.01)), float(np.quantile(slopes, 0.99)))
    return {"slope": float(slope), "intercept": float(intercept), "ci": ci}


# --- quadrature oracle for the dependence negative control -----------------------

def lognormal_shuffle_log_covariance(sigma: float = 1.0, order: int = 80) -> dict:
    """Moments of the one-step update fed with iid lognormal(0, sigma^2).

    With X, Y iid lognormal and S = X + Y, the updated pair (B * S', (1-B) * S')
    built from independent copies has log-scale covariance
    2 Var(log S) - 2 Cov(log X, log S) and per-coordinate log variance
    Var(log X) + 2 Var(log S) - 2 Cov(log X, log S); computed here by
    two-dimensional Gauss-Hermite quadrature.  The Gamma case yields
    covariance 0, this strictly positive reference certifies the negative
    control.
    """
    nodes, wts = np.polynomial.hermite_e.hermegauss(order)
    wts = wts / math.sqrt(2.0 * math.pi)
    z1 = nodes[:, None]
    z2 = nodes[None, :]
    w2 = wts[:, None] * wts[None, :]
    log_s = np.log(np.exp(sigma * z1) + np.exp(sigma * z2))
    log_x = sigma * z1 * np.ones_like(z2)
    e_ls = float(np.sum(w2 * log_s))
    e_ls2 = float(np.sum(w2 * log_s**2))
    e_lx_ls = float(np.sum(w2 * log_x * log_s))
    var_ls = e_ls2 - e_ls**2
    cov_lx_ls = e_lx_ls - 0.0 * e_ls   # E[log X] = 0
    cov = 2.0 * var_ls - 2.0 * cov_lx_ls
    var_log_each = sigma**2 + 2.0 * var_ls - 2.0 * cov_lx_ls
    return {
        "cov_log": cov,
        "var_log": var_log_each,
        "pearson_log": cov / var_log_each,
        "var_log_s": var_ls,
        "cov_logx_logs": cov_lx_ls,
    }
