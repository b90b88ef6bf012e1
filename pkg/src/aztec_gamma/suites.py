"""Orchestrated verification suites: one reproducible TestReport per claim.

Each suite function takes explicit sizes/replica counts plus a master seed
and returns a list of TestReports.  Quenched identities are checked against
exhaustive enumeration at tolerance ~1e-10 (they hold exactly); annealed
distributional matchings are checked by two-sample TV/chi-square tests;
marginal laws by KS at level 1e-3 with Bonferroni inside a suite.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np
from scipy import stats as sps

from . import oracle
from .fock import fock_face_weights, limit_face_weights
from .freeenergy import free_energy_mc
from .matching import turning_points_batch, vertical_slice, horizontal_slice
from .params import ParamSet
from .polymers import (bg_polymer_exact, bg_weights_from_cascade, beta_rwre_endpoints_batch,
                       burke_ratios, glg_polymer_exact, glg_weights_from_cascade,
                       stat_loggamma, stat_strictweak, xmid_batch)
from .randvars import gamma_field
from .rng import RngStream
from .shuffling import sample_matchings_batch, shuffle_transition_distribution, empty_matching
from .stats import (TestReport, chi2_to_exact, discrete_two_sample, ks_critical,
                    ks_one_sample, ks_statistic, ks_statistic_lattice,
                    lognormal_shuffle_log_covariance, pearson_r, scaling_exponent,
                    tv_to_exact)
from .weights import (cascade, downshuffle_arrays, partition_product,
                      sample_weight_field, upshuffle_arrays)
from .matching import Matching


def _counts(values) -> dict:
    return dict(Counter(values))


def sample_turning_points(alpha: float, beta: float, n: int, replicas: int,
                          rng: RngStream, chunk: int = 20000) -> np.ndarray:
    """Annealed (north, east, south, west) samples, fresh weights per replica."""
    out = np.empty((replicas, 4), dtype=np.int64)
    done = 0
    while done < replicas:
        c = min(chunk, replicas - done)
        a = rng.generator.gamma(alpha, size=(c, n, n))
        b = rng.generator.gamma(beta, size=(c, n, n))
        grids = sample_matchings_batch(a, b, rng)
        out[done:done + c] = turning_points_batch(grids)
        done += c
    return out


# --- criterion 1: partition function factorization --------------------------------

def partition_suite(seed: int, sizes=range(1, 6), fields_per_size: int = 50,
                    tol: float = 1e-9) -> list[TestReport]:
    rng = RngStream(seed, 101)
    worst = 0.0
    for n in sizes:
        params = ParamSet.biased(0.6, 0.8, n)
        for _ in range(fields_per_size):
            f = sample_weight_field(params, n, rng)
            lp = partition_product(cascade(f))
            lz = oracle.enumerate_log_z(oracle.aztec_graph(f))
            worst = max(worst, abs(lp - lz))
    return [TestReport("partition-factorization", worst, tol, worst < tol,
                       sample_sizes=(len(list(sizes)), fields_per_size),
                       seeds=(seed, 101))]


# --- criterion 2: shuffle sampler correctness --------------------------------------

def shuffle_suite(seed: int, sizes=(2, 3), envs: int = 5, replicas: int = 100_000,
                  tv_tol: float = 0.02, level: float = 1e-3) -> list[TestReport]:
    reports = []
    for n in sizes:
        for e in range(envs):
            rng = RngStream(seed, 200 + 10 * n + e)
            params = ParamSet.biased(0.7, 0.9, n)
            f = sample_weight_field(params, n, rng)
            exact = oracle.aztec_measure(f)
            grids = sample_matchings_batch(f.a, f.b, rng, replicas=replicas)
            counts = _counts(g.tobytes() for g in grids)
            tv = tv_to_exact(counts, exact)
            stat, pval = chi2_to_exact(counts, exact)
            reports.append(TestReport(
                f"shuffle-law-n{n}-env{e}", tv, tv_tol,
                tv < tv_tol and pval > level,
                sample_sizes=(replicas,), seeds=(seed, 200 + 10 * n + e),
                detail={"chi2": stat, "chi2_pvalue": pval}))
    return reports


# --- criterion 3: quenched slice matchings ------------------------------------------

def slice_suite(seed: int, cases=((3, 1), (3, 2), (3, 3), (4, 2)),
                tol: float = 1e-10) -> list[TestReport]:
    reports = []
    for n, l in cases:
        rng = RngStream(seed, 300 + 10 * n + l)
        params = ParamSet.biased(0.8, 0.7, n)
        f = sample_weight_field(params, n, rng)
        fields = cascade(f)
        meas = oracle.enumerate_matchings(oracle.aztec_graph(f))

        law_v = meas.pushforward(
            lambda pairs: vertical_slice(oracle.pairs_to_matching(n, pairs), l))
        bw, gw = bg_weights_from_cascade(fields, n, l)
        law_poly = bg_polymer_exact(n - l + 1, l, bw, gw).x_poly_law()
        tv_v = 0.5 * sum(abs(law_v.get(k, 0) - law_poly.get(k, 0))
                         for k in set(law_v) | set(law_poly))
        reports.append(TestReport(f"vert-slice-n{n}-l{l}", tv_v, tol, tv_v < tol,
                                  seeds=(seed, 300 + 10 * n + l)))

        law_h = meas.pushforward(
            lambda pairs: horizontal_slice(oracle.pairs_to_matching(n, pairs), l))
        rw, kw = glg_weights_from_cascade(fields, n, l)
        law_poly_h = glg_polymer_exact(n - l + 1, l, rw, kw).x_poly_law()
        tv_h = 0.5 * sum(abs(law_h.get(k, 0) - law_poly_h.get(k, 0))
                         for k in set(law_h) | set(law_poly_h))
        reports.append(TestReport(f"horiz-slice-n{n}-l{l}", tv_h, tol, tv_h < tol,
                                  seeds=(seed, 300 + 10 * n + l)))
    return reports


# --- criterion 4: quenched dynamical matching ---------------------------------------

def shuffle_chain_slice_law(fields, k: int, T: int) -> dict:
    """Exact joint law of the k-th-column-from-the-right process over
    tau = 0..T, driven by the enumerated shuffle transition kernel.

    States map a matching key to {history: prob}; the tau = 0 entry is the
    deterministic (1..k) recorded when the matching reaches level k-1, and
    the tau-th entry is the tau-th column statistic of the level-(tau+k-1)
    matching.
    """
    n = T + k - 1

    def record(level, m: Matching, hist: tuple) -> tuple:
        tau = level - k + 1
        if tau == 0:
            return hist + (tuple(range(1, k + 1)),)
        if 1 <= tau <= T:
            return hist + (tuple(sorted(vertical_slice(m, tau))),)
        return hist

    init_hist = (tuple(range(1, k + 1)),) if k == 1 else ()
    cur: dict = {empty_matching().key(): {init_hist: 1.0}}
    level = 0
    while level < n:
        f = fields[n - level - 1]
        nxt: dict = {}
        for mkey, hists in cur.items():
            m = Matching(level, np.frombuffer(mkey, dtype=np.int8).reshape(level, level + 1).copy())
            for m2, p in shuffle_transition_distribution(m, f):
                k2 = m2.key()
                sub = nxt.setdefault(k2, {})
                for hist, q in hists.items():
                    h2 = record(level + 1, m2, hist)
                    sub[h2] = sub.get(h2, 0.0) + q * p
        cur = nxt
        level += 1
    law: dict = {}
    for hists in cur.values():
        for hist, q in hists.items():
            law[hist] = law.get(hist, 0.0) + q
    return law


def dynamical_suite(seed: int, ks=(1, 2), T: int = 3, envs: int = 5,
                    tol: float = 1e-9) -> list[TestReport]:
    reports = []
    for k in ks:
        n = T + k - 1
        worst = 0.0
        for e in range(envs):
            rng = RngStream(seed, 400 + 10 * k + e)
            params = ParamSet.biased(0.9, 0.6, n)
            f = sample_weight_field(params, n, rng)
            fields = cascade(f)
            law_chain = shuffle_chain_slice_law(fields, k, T)
            bw, gw = bg_weights_from_cascade(fields, n, T)
            pm = bg_polymer_exact(k, T, bw, gw)
            law_poly = pm.pushforward(
                lambda t: tuple(tuple(sorted(t.pi_record(tau))) for tau in range(T + 1)))
            tv = 0.5 * sum(abs(law_chain.get(h, 0) - law_poly.get(h, 0))
                           for h in set(law_chain) | set(law_poly))
            worst = max(worst, tv)
        reports.append(TestReport(f"dynamical-k{k}-T{T}", worst, tol, worst < tol,
                                  sample_sizes=(envs,), seeds=(seed, 400 + 10 * k)))
    return reports


# --- criterion 5: East turning point --------------------------------------------------

def east_suite(seed: int, n: int = 6, replicas: int = 100_000, tv_tol: float = 0.03,
               clt_n: int = 2000, alpha: float = 0.8, beta: float = 0.8,
               level: float = 1e-3) -> list[TestReport]:
    rng = RngStream(seed, 500)
    tps = sample_turning_points(alpha, beta, n, replicas, rng)
    east = tps[:, 1]
    walk = beta_rwre_endpoints_batch(alpha, beta, n, rng, replicas) - 1
    rep = discrete_two_sample(_counts(east.tolist()), _counts(walk.tolist()),
                              tv_tol, test_id=f"east-vs-walk-n{n}",
                              seeds=(seed, 500))
    ends = beta_rwre_endpoints_batch(alpha, beta, clt_n, rng, replicas) - 1.0
    mean = beta / (alpha + beta) * clt_n
    var = alpha * beta / (alpha + beta) ** 2
    sig = math.sqrt(clt_n * var)
    normed = (ends - mean) / sig
    d = ks_statistic_lattice(normed, sps.norm.cdf, 1.0 / sig)
    crit = ks_critical(replicas, level)
    rep2 = TestReport(f"east-clt-n{clt_n}", d, crit, d < crit,
                      sample_sizes=(replicas,), seeds=(seed, 500),
                      detail={"var_expected": var,
                              "var_empirical": float(ends.var() / clt_n)})
    return [rep, rep2]


# --- criterion 6: West and South stationary matchings ---------------------------------

def west_south_suite(seed: int, n: int = 10, replicas: int = 100_000,
                     alpha: float = 0.8, beta: float = 0.8,
                     tv_tol: float = 0.03) -> list[TestReport]:
    rng = RngStream(seed, 600)
    tps = sample_turning_points(alpha, beta, n, replicas, rng, chunk=20000)
    west = tps[:, 3]
    south = tps[:, 2]
    xm_lg = xmid_batch("inv-gamma", n, alpha, beta, rng, replicas, chunk=2000)
    rep_w = discrete_two_sample(_counts(west.tolist()), _counts(xm_lg.tolist()),
                                tv_tol, test_id=f"west-vs-gamma-mid-n{n}",
                                seeds=(seed, 600))
    xm_sw = xmid_batch("strict-weak", n, alpha, beta, rng, replicas, chunk=2000)
    rep_s = discrete_two_sample(_counts(south.tolist()), _counts(xm_sw.tolist()),
                                tv_tol, test_id=f"south-vs-strictweak-mid-n{n}",
                                seeds=(seed, 600))
    return [rep_w, rep_s]


# --- criterion 7: ratio stationarity --------------------------------------------------

def burke_suite(seed: int, envs: int = 100_000, alpha: float = 0.9,
                beta: float = 0.7, level: float = 1e-3) -> list[TestReport]:
    rng = RngStream(seed, 700)
    reports = []
    env = stat_loggamma(2, 2, alpha, beta, rng, replicas=(envs,))
    u, v = burke_ratios(env, 2, 2)
    reports.append(ks_one_sample(u, sps.invgamma(beta).cdf,
                                 test_id="ratio-u-inv-gamma", level=level,
                                 seeds=(seed, 700)))
    reports.append(ks_one_sample(v, sps.invgamma(alpha).cdf,
                                 test_id="ratio-v-inv-gamma", level=level,
                                 seeds=(seed, 700)))
    # staircase independence: U/V along the down-right path through (2,2)
    lz = env.log_z
    stair = [
        np.exp(lz[:, 1, 2] - lz[:, 0, 2]),
        np.exp(lz[:, 1, 2] - lz[:, 1, 1]),
        np.exp(lz[:, 2, 1] - lz[:, 1, 1]),
        np.exp(lz[:, 2, 1] - lz[:, 2, 0]),
    ]
    worst = 0.0
    for i in range(len(stair)):
        for j in range(i + 1, len(stair)):
            worst = max(worst, abs(pearson_r(stair[i], stair[j])))
    bound = 5.0 / math.sqrt(envs)
    reports.append(TestReport("ratio-staircase-independence", worst, bound,
                              worst < bound, sample_sizes=(envs,),
                              seeds=(seed, 700)))
    env2 = stat_strictweak(2, 2, alpha, beta, rng, replicas=(envs,))
    u2, v2 = burke_ratios(env2, 2, 2)
    reports.append(ks_one_sample(u2, sps.gamma(alpha + beta).cdf,
                                 test_id="ratio-u-strict-weak", level=level,
                                 seeds=(seed, 700)))
    reports.append(ks_one_sample(v2, lambda t: sps.beta(beta, alpha).sf(1.0 / t),
                                 test_id="ratio-v-strict-weak", level=level,
                                 seeds=(seed, 700)))
    # antidiagonal ratio V_{n-j,j}/U_{n-j-1,j+1} is inverse-Gamma(beta)
    v_d = np.exp(env2.log_z[:, 1, 1] - env2.log_z[:, 1, 0])
    u_d = np.exp(env2.log_z[:, 1, 1] - env2.log_z[:, 0, 1])
    reports.append(ks_one_sample(v_d / u_d, sps.invgamma(beta).cdf,
                                 test_id="ratio-antidiagonal-strict-weak",
                                 level=level, seeds=(seed, 700)))
    return reports


# --- criterion 8: Gamma preservation and the characterization probe --------------------

def _test_params(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """A mildly inhomogeneous admissible parameter triple over 1..n+2."""
    j = np.arange(0, n + 3)
    psi = 0.7 + 0.1 * (j % 2)
    phi = 0.8 + 0.1 * (j % 3 == 0)
    theta = 0.08 * ((np.arange(1, n + 3) % 2) - 0.5)
    return psi, phi, theta


def preservation_suite(seed: int, n: int = 4, replicas: int = 100_000,
                       level: float = 1e-3, pair_count: int = 20) -> list[TestReport]:
    rng = RngStream(seed, 800)
    psi, phi, theta = _test_params(n)
    reports = []

    # one down-shuffle: level-n field -> level-(n-1) marginals
    a_shape = theta[1:n + 1, None] + psi[None, 1:n + 1]
    b_shape = phi[None, 1:n + 1] - theta[1:n + 1, None]   # phi_{j-n} ~ phi[j] offset
    a = gamma_field(rng, a_shape, size_prefix=(replicas,))
    b = gamma_field(rng, b_shape, size_prefix=(replicas,))
    da, db = downshuffle_arrays(a, b)
    cells = 2 * (n - 1) ** 2
    bonf = level / cells
    worst_margin = np.inf
    for i in range(n - 1):
        for j in range(n - 1):
            d = ks_statistic(da[:, i, j], sps.gamma(a_shape[i, j]).cdf)
            worst_margin = min(worst_margin, ks_critical(replicas, bonf) - d)
            d = ks_statistic(db[:, i, j], sps.gamma(b_shape[i, j + 1]).cdf)
            worst_margin = min(worst_margin, ks_critical(replicas, bonf) - d)
    reports.append(TestReport("downshuffle-marginals", float(worst_margin), 0.0,
                              worst_margin > 0, sample_sizes=(replicas,),
                              seeds=(seed, 800),
                              detail={"cells": cells, "bonferroni": bonf}))

    # one up-shuffle on an extended window i in 1..n, j in 0..n
    a_shape_u = theta[1:n + 1, None] + psi[None, 0:n + 1]
    b_shape_u = phi[None, 0:n + 1] - theta[1:n + 1, None]
    au = gamma_field(rng, a_shape_u, size_prefix=(replicas,))
    bu = gamma_field(rng, b_shape_u, size_prefix=(replicas,))
    ua, ub = upshuffle_arrays(au, bu)       # rows i = 2..n, cols j = 1..n
    worst_margin_u = np.inf
    for i in range(n - 1):
        for j in range(n):
            d = ks_statistic(ua[:, i, j], sps.gamma(a_shape_u[i + 1, j + 1]).cdf)
            worst_margin_u = min(worst_margin_u, ks_critical(replicas, bonf) - d)
            d = ks_statistic(ub[:, i, j], sps.gamma(b_shape_u[i + 1, j]).cdf)
            worst_margin_u = min(worst_margin_u, ks_critical(replicas, bonf) - d)
    reports.append(TestReport("upshuffle-marginals", float(worst_margin_u), 0.0,
                              worst_margin_u > 0, sample_sizes=(replicas,),
                              seeds=(seed, 800)))

    # sampled pairwise independence after the up-shuffle
    g = rng.generator
    flat = np.concatenate([ua.reshape(replicas, -1), ub.reshape(replicas, -1)], axis=1)
    ncols = flat.shape[1]
    worst_r = 0.0
    for _ in range(pair_count):
        i, j = g.choice(ncols, size=2, replace=False)
        worst_r = max(worst_r, abs(pearson_r(flat[:, i], flat[:, j])))
    bound = 5.0 / math.sqrt(replicas)
    reports.append(TestReport("upshuffle-pairwise-r", worst_r, bound,
                              worst_r < bound, sample_sizes=(replicas,),
                              seeds=(seed, 800), detail={"pairs": pair_count}))

    # negative control: lognormal environment becomes detectably dependent
    ref = lognormal_shuffle_log_covariance(1.0)
    la = g.lognormal(size=(replicas, 2, 2))
    lb = g.lognormal(size=(replicas, 2, 2))
    ua2, ub2 = upshuffle_arrays(la, lb)
    r_log = pearson_r(np.log(ua2[:, 0, 0]), np.log(ub2[:, 0, 0]))
    se = (1.0 - ref["pearson_log"] ** 2) / math.sqrt(replicas)
    thresh = ref["pearson_log"] - 3.0 * se
    reports.append(TestReport("lognormal-control", abs(r_log), thresh,
                              abs(r_log) > thresh, sample_sizes=(replicas,),
                              seeds=(seed, 800),
                              detail={"reference_r": ref["pearson_log"]}))
    return reports


# --- criterion 9: free energy -----------------------------------------------------------

def free_energy_suite(seed: int, n: int = 20, temps=(0.01, 1.0, 100.0),
                      alpha: float = 0.5, beta: float = 0.5,
                      replicas: int = 10_000, level: float = 1e-3) -> list[TestReport]:
    reports = []
    terms = n * (n + 1) // 2
    for ti, T in enumerate(temps):
        rng = RngStream(seed, 900 + ti)
        params = ParamSet.biased(alpha, beta, n)
        rep = free_energy_mc(params, n, T, replicas, rng)
        se = math.sqrt(rep.variance / replicas)
        mean_ok = abs(rep.empirical_mean - rep.mean) < 4 * se
        var_ok = abs(rep.empirical_var - rep.variance) < 0.1 * rep.variance
        ks_ok = rep.ks_normal < rep.ks_crit
        sandwich_ok = rep.gap_lower < rep.gap < rep.gap_upper
        passed = mean_ok and var_ok and ks_ok and sandwich_ok
        reports.append(TestReport(
            f"free-energy-T{T}", rep.ks_normal, rep.ks_crit, passed,
            sample_sizes=(replicas,), seeds=(seed, 900 + ti),
            detail={
                "mean_gap_se": (rep.empirical_mean - rep.mean) / se,
                "var_ratio": rep.empirical_var / rep.variance,
                "formula_mean": rep.mean,
                "expected_mean_terms": terms,
                "gap": rep.gap, "gap_lower": rep.gap_lower,
                "gap_upper": rep.gap_upper,
                "variance_alt_ratio": rep.variance_alt / rep.variance,
            }))
    return reports


# --- criterion 10: scaling exponents -----------------------------------------------------

def scaling_suite(seed: int, sizes=(64, 128, 256, 512), envs: int = 10_000,
                  alpha: float = 1.0, beta: float = 1.0,
                  poly_window=(0.55, 0.80), walk_window=(0.42, 0.58)
                  ) -> list[TestReport]:
    reports = []
    for kind, win in (("inv-gamma", poly_window), ("strict-weak", poly_window)):
        series = []
        for si, nn in enumerate(sizes):
            rng = RngStream(seed, 1000 + si + (0 if kind == "inv-gamma" else 50))
            series.append((nn, xmid_batch(kind, nn, alpha, beta, rng, envs,
                                          chunk=max(8, 4096 // nn))))
        fit = scaling_exponent(series, RngStream(seed, 1099))
        slope = fit["slope"]
        reports.append(TestReport(
            f"midpoint-scaling-{kind}", slope, win[1],
            win[0] <= slope <= win[1], sample_sizes=(envs,),
            seeds=(seed, 1000), detail={"window": list(win), "ci": fit["ci"]}))
    series = []
    for si, nn in enumerate(sizes):
        rng = RngStream(seed, 1100 + si)
        series.append((nn, beta_rwre_endpoints_batch(alpha, beta, nn, rng, envs)))
    fit = scaling_exponent(series, RngStream(seed, 1199))
    slope = fit["slope"]
    reports.append(TestReport(
        "endpoint-scaling-beta-walk", slope, walk_window[1],
        walk_window[0] <= slope <= walk_window[1], sample_sizes=(envs,),
        seeds=(seed, 1100), detail={"window": list(walk_window), "ci": fit["ci"]}))
    return reports


# --- criterion 11: graph-transform identities ---------------------------------------------

def transform_suite(seed: int, tol: float = 1e-10) -> list[TestReport]:
    rng = RngStream(seed, 1200)
    g = rng.generator
    reports = []

    # square move: Z factor identity on random pattern-bearing graphs
    worst = 0.0
    for _ in range(10):
        gr = _random_square_pattern_graph(rng)
        gr2, logf = oracle.spider_move(gr, ("T", "L", "R", "Bo"))
        worst = max(worst, abs(oracle.enumerate_log_z(gr)
                               - logf - oracle.enumerate_log_z(gr2)))
    reports.append(TestReport("square-move-z", worst, tol, worst < tol,
                              seeds=(seed, 1200)))

    # square-move coupling pushes the dimer measure exactly
    worst = 0.0
    for _ in range(10):
        gr = _random_square_pattern_graph(rng)
        gr2, transport = oracle.spider_coupling(gr, ("T", "L", "R", "Bo"))
        m1 = oracle.enumerate_matchings(gr)
        m2 = oracle.enumerate_matchings(gr2)
        law = {}
        for idx, p in enumerate(m1.probs):
            for key2, q in transport(frozenset(tuple(pr) for pr in m1.pairs(idx))):
                law[key2] = law.get(key2, 0.0) + float(p) * q
        exact = {frozenset(tuple(pr) for pr in m2.pairs(i)): float(p)
                 for i, p in enumerate(m2.probs)}
        worst = max(worst, 0.5 * sum(abs(law.get(k, 0) - exact.get(k, 0))
                                     for k in set(law) | set(exact)))
    reports.append(TestReport("square-move-coupling", worst, tol, worst < tol,
                              seeds=(seed, 1200)))

    # vertex dilation: Z and matching count invariance
    worst = 0.0
    counts_ok = True
    for _ in range(10):
        gr = _random_square_pattern_graph(rng)
        v = gr.whites[int(g.integers(len(gr.whites)))]
        nbrs = sorted({b for w, b, _ in gr.edges if w == v}, key=repr)
        split = set(nbrs[: max(1, len(nbrs) // 2)])
        ge = oracle.vertex_expand(gr, v, split)
        worst = max(worst, abs(oracle.enumerate_log_z(ge) - oracle.enumerate_log_z(gr)))
        counts_ok &= (len(oracle.enumerate_matchings(ge).matchings)
                      == len(oracle.enumerate_matchings(gr).matchings))
    reports.append(TestReport("vertex-dilation-z", worst, tol,
                              worst < tol and counts_ok, seeds=(seed, 1200)))

    # column commutation: Z and outside-edge marginals
    worst_z = 0.0
    worst_m = 0.0
    for n in (2, 3):
        params = ParamSet.biased(0.7, 0.8, n)
        f = sample_weight_field(params, n, rng)
        fields = cascade(f)
        base = oracle.aztec_vert_graph(fields)
        mb = oracle.enumerate_matchings(base.graph)
        marg_b = _edge_marginals(mb)
        for k in range(1, n):
            swp = oracle.aztec_vert_graph(fields, swap_pair=k)
            ms = oracle.enumerate_matchings(swp.graph)
            worst_z = max(worst_z, abs(ms.log_z - mb.log_z))
            marg_s = _edge_marginals(ms)
            swap_cols = {2 * (k - 1), 2 * k - 1}
            for key in set(marg_b) & set(marg_s):
                cols = {v[1] for v in key if v[0] in ("B", "G", "P")}
                if cols & swap_cols:
                    continue
                worst_m = max(worst_m, abs(marg_b[key] - marg_s[key]))
    reports.append(TestReport("column-swap-z", worst_z, tol, worst_z < tol,
                              seeds=(seed, 1200)))
    reports.append(TestReport("column-swap-marginals", worst_m, tol, worst_m < tol,
                              seeds=(seed, 1200)))

    # one-step partition ratio: log Z_{n+1} - log Z_n is the top boundary product
    worst = 0.0
    for n in (1, 2, 3):
        for _ in range(5):
            params = ParamSet.biased(0.8, 0.7, n + 1)
            f = sample_weight_field(params, n + 1, rng)
            lz_hi = oracle.enumerate_log_z(oracle.aztec_graph(f))
            lz_lo = oracle.enumerate_log_z(oracle.aztec_graph(cascade(f)[1]))
            boundary = float(np.sum(np.log(f.a[0] + f.b[0])))
            worst = max(worst, abs(lz_hi - lz_lo - boundary))
    reports.append(TestReport("partition-ratio", worst, tol, worst < tol,
                              seeds=(seed, 1200)))

    # frozen edges of the swap graphs, all sizes <= 4, all l
    ok = True
    for n in (2, 3, 4):
        params = ParamSet.biased(0.9, 0.8, n)
        f = sample_weight_field(params, n, rng)
        fields = cascade(f)
        for l in range(1, n + 2):
            for builder in (oracle.build_vswap, oracle.build_hswap):
                cg = builder(fields, l)
                meas = oracle.enumerate_matchings(cg.graph)
                frozen = set(cg.frozen)
                sent = set(cg.sentinel)
                for idx in range(len(meas.matchings)):
                    ps = {frozenset(p) for p in meas.pairs(idx)}
                    ok &= frozen <= ps and not (sent & ps)
    reports.append(TestReport("swap-frozen-edges", 0.0 if ok else 1.0, 0.5, ok,
                              seeds=(seed, 1200)))
    return reports


def _edge_marginals(meas: oracle.ExactMeasure) -> dict:
    out: dict = {}
    for idx, p in enumerate(meas.probs):
        for pr in meas.pairs(idx):
            key = frozenset(pr)
            out[key] = out.get(key, 0.0) + float(p)
    return out


def _random_square_pattern_graph(rng: RngStream) -> oracle.BipartiteGraph:
    g = rng.generator
    whites = ["T", "Bo", "tL", "tR", "w1", "w2"]
    blacks = ["L", "R", "tT", "tBo", "b1", "b2"]
    w, x, y, z = g.gamma(2.0, size=4) + 0.05
    edges = [("T", "L", w), ("T", "R", x), ("Bo", "L", y), ("Bo", "R", z),
             ("T", "tT", 1.0), ("tL", "L", 1.0), ("tR", "R", 1.0), ("Bo", "tBo", 1.0)]
    ctx = [("w1", "b1"), ("w2", "b2"), ("tL", "b1"), ("w1", "tBo"), ("tR", "b2"),
           ("w2", "tBo"), ("tL", "b2"), ("w1", "tT"), ("tR", "b1"), ("w2", "tT")]
    for a, b in ctx:
        edges.append((a, b, float(g.gamma(2.0) + 0.05)))
    return oracle.BipartiteGraph(whites, blacks, edges)


# --- criterion 12: deterministic face-weight limit -----------------------------------------

def fock_suite(seed: int, n: int = 4, param_sets: int = 10,
               window=(0.4, 0.6)) -> list[TestReport]:
    rng = RngStream(seed, 1300)
    g = rng.generator
    ok = True
    worst_ratio_lo, worst_ratio_hi = np.inf, 0.0
    for _ in range(param_sets):
        psi = (0.5 + g.random(n + 1)).tolist()
        phi = (1.8 + g.random(n + 1)).tolist()
        theta = (0.2 * (g.random(n) - 0.5)).tolist()
        params = ParamSet(psi=psi, phi=phi, theta=theta, phi_min_index=-n)
        lim = limit_face_weights(params, n)
        errs = []
        for delta in (1e2, 1e3, 1e4, 2e2, 2e3, 2e4):
            fw = fock_face_weights(params, n, delta)
            err = max(np.abs(fw.even - lim.even).max(),
                      np.abs(fw.odd - lim.odd).max() if fw.odd.size else 0.0)
            errs.append(err)
        for i in range(3):
            ratio = errs[i + 3] / errs[i]
            worst_ratio_lo = min(worst_ratio_lo, ratio)
            worst_ratio_hi = max(worst_ratio_hi, ratio)
            ok &= window[0] <= ratio <= window[1]
    return [TestReport("fock-limit-rate", float(worst_ratio_hi), window[1], ok,
                       seeds=(seed, 1300),
                       detail={"min_ratio": float(worst_ratio_lo),
                               "window": list(window)})]


# --- orchestrator ---------------------------------------------------------------------------

SUITES = {
    "partition": partition_suite,
    "shuffle": shuffle_suite,
    "slices": slice_suite,
    "dynamical": dynamical_suite,
    "east": east_suite,
    "west-south": west_south_suite,
    "burke": burke_suite,
    "preservation": preservation_suite,
    "free-energy": free_energy_suite,
    "scaling": scaling_suite,
    "transforms": transform_suite,
    "fock": fock_suite,
}


def match_suite(config: dict) -> list[TestReport]:
    """Run the selected theorem-matching suites from a config dict.

    Keys: "tests" (list of suite names), "seed" (int); remaining keys are
    forwarded to each suite when its signature accepts them.
    """
    import inspect

    names = config.get("tests", list(SUITES))
    seed = int(config.get("seed", 0))
    reports = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}")
        fn = SUITES[name]
        kwargs = {}
        sig = inspect.signature(fn)
        for key, val in config.items():
            if key in ("tests", "seed"):
                continue
            if key in sig.parameters:
                kwargs[key] = val
        reports.extend(fn(seed, **kwargs))
    return reports
