"""Directed lattice polymers: hybrid two-regime models, stationary
single-path models, the boundary-weighted dual polymer, and a random walk
in Beta random environment.

The hybrid digraph D(p, m) has vertices

    left:  -m <= x <= -1, -m-p <= y <= -1, x+y >= -m-p
    right:  0 <= x <= min(p-1, y+m+p), -m-p <= y <= -1

with right/down-right moves on the left half and right/down moves on the
right half.  A configuration is a p-tuple of vertex-disjoint paths, path j
running from (-m, -j) to (p-j, -m-j).  Two weightings are used:

* branch-merge ("beta-Gamma"): left edges carry (beta, 1-beta) pairs and
  right horizontal edges carry gamma weights, down edges weight 1;
* merge-branch ("Gamma-log-Gamma"): left horizontal edges carry rho, left
  down-right edges weight 1, and both outgoing right-half edges of a vertex
  carry the same kappa weight.

The slice statistic of a tuple is the set of entry heights into the column
x = 0; it matches vertical (resp. horizontal) slice statistics of the
dimer model when the weights are mapped from a diamond weight cascade.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ParamSet
from .randvars import log_gamma_draw, sample_beta, BetaParams
from .rng import RngStream

TUPLE_ENUM_GUARD = 4


def hybrid_vertices(p: int, m: int) -> set[tuple[int, int]]:
    verts = set()
    for x in range(-m, 0):
        for y in range(-m - p, 0):
            if x + y >= -m - p:
                verts.add((x, y))
    for y in range(-m - p, 0):
        for x in range(0, min(p - 1, y + m + p) + 1):
            verts.add((x, y))
    return verts


@dataclass(frozen=True)
class PathTuple:
    """A tuple of vertex-disjoint directed paths on D(p, m)."""
    p: int
    m: int
    paths: tuple  # tuple of tuples of (x, y)

    def __post_init__(self):
        seen = set()
        for j, path in enumerate(self.paths, start=1):
            if path[0] != (-self.m, -j):
                raise ValueError(f"path {j} must start at (-m, -{j})")
            if path[-1] != (self.p - j, -self.m - j):
                raise ValueError(f"path {j} must end at (p-{j}, -m-{j})")
            for v in path:
                if v in seen:
                    raise ValueError(f"paths intersect at {v}")
                seen.add(v)

    def x_poly(self) -> frozenset[int]:
        """Entry heights into the column x = 0 (one positive label per path)."""
        out = set()
        for path in self.paths:
            out.add(min(-v[1] for v in path if v[0] == 0))
        return frozenset(out)

    def pi_record(self, tau: int) -> tuple[int, ...]:
        """The height tuple at horizontal position tau in 0..m."""
        if not 0 <= tau <= self.m:
            raise ValueError("tau outside 0..m")
        out = []
        for path in self.paths:
            if tau < self.m:
                ys = [-v[1] for v in path if v[0] == -self.m + tau]
                assert len(ys) == 1
                out.append(ys[0])
            else:
                out.append(min(-v[1] for v in path if v[0] == 0))
        return tuple(out)

    def steps(self) -> list[str]:
        """Per-path step strings: R right, D down, E down-right."""
        out = []
        for path in self.paths:
            s = []
            for (x0, y0), (x1, y1) in zip(path, path[1:]):
                if (x1 - x0, y1 - y0) == (1, 0):
                    s.append("R")
                elif (x1 - x0, y1 - y0) == (0, -1):
                    s.append("D")
                elif (x1 - x0, y1 - y0) == (1, -1):
                    s.append("E")
                else:
                    raise ValueError("invalid step")
            out.append("".join(s))
        return out

    def key(self):
        return tuple(self.steps())


def _enumerate_routes(p, m, verts, j, blocked):
    """All routes of path j avoiding ``blocked`` vertices, as vertex tuples."""
    start = (-m, -j)
    end = (p - j, -m - j)
    routes = []

    def dfs(v, acc):
        if v == end:
            routes.append(tuple(acc))
            return
        x, y = v
        if x < 0:
            nxt = [(x + 1, y), (x + 1, y - 1)]
        else:
            nxt = [(x, y - 1), (x + 1, y)]
        for u in nxt:
            if u not in verts or u in blocked:
                continue
            if u[0] > end[0] or u[1] < end[1]:
                continue
            acc.append(u)
            dfs(u, acc)
            acc.pop()

    if start not in blocked:
        dfs(start, [start])
    return routes


def enumerate_path_tuples(p: int, m: int) -> list[PathTuple]:
    """All vertex-disjoint path tuples on D(p, m); guarded to p, m <= 4."""
    if p > TUPLE_ENUM_GUARD or m > TUPLE_ENUM_GUARD:
        raise ValueError(f"path-tuple enumeration limited to p, m <= {TUPLE_ENUM_GUARD}")
    verts = hybrid_vertices(p, m)
    tuples: list[PathTuple] = []

    def rec(j, blocked, acc):
        if j > p:
            tuples.append(PathTuple(p, m, tuple(acc)))
            return
        for route in _enumerate_routes(p, m, verts, j, blocked):
            rec(j + 1, blocked | set(route), acc + [route])

    rec(1, set(), [])
    return tuples


@dataclass
class ExactPathMeasure:
    p: int
    m: int
    tuples: list[PathTuple]
    log_weights: np.ndarray
    log_z: float

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_weights - self.log_z)

    def pushforward(self, func) -> dict:
        out: dict = {}
        for t, pr in zip(self.tuples, self.probs):
            k = func(t)
            out[k] = out.get(k, 0.0) + float(pr)
        return out

    def x_poly_law(self) -> dict:
        return self.pushforward(lambda t: t.x_poly())


def _measure_from_edge_logwt(p, m, edge_logwt) -> ExactPathMeasure:
    tuples = enumerate_path_tuples(p, m)
    logs = []
    for t in tuples:
        lw = 0.0
        for path in t.paths:
            for a, b in zip(path, path[1:]):
                lw += edge_logwt(a, b)
        logs.append(lw)
    arr = np.array(logs)
    hi = arr.max()
    log_z = float(hi + np.log(np.sum(np.exp(arr - hi))))
    return ExactPathMeasure(p, m, tuples, arr, log_z)


def bg_polymer_exact(p: int, m: int, beta_wts: dict, gamma_wts: dict) -> ExactPathMeasure:
    """Exact branch-merge measure from explicit weight dicts keyed by (x, y).

    Left-half vertex (x, y): right edge weight beta[x,y], down-right edge
    1 - beta[x,y].  Right half: down edges weight 1, right edges gamma[x,y].
    """

    def edge_logwt(a, b):
        (x0, y0), (x1, y1) = a, b
        if x0 < 0:
            bb = beta_wts[(x0, y0)]
            return math.log(bb if y1 == y0 else 1.0 - bb)
        if (x1, y1) == (x0, y0 - 1):
            return 0.0
        return math.log(gamma_wts[(x0, y0)])

    return _measure_from_edge_logwt(p, m, edge_logwt)


def glg_polymer_exact(p: int, m: int, rho_wts: dict, kappa_wts: dict) -> ExactPathMeasure:
    """Exact merge-branch measure: left R edges rho, left DR edges 1,
    both right-half out-edges kappa of their source vertex."""

    def edge_logwt(a, b):
        (x0, y0), (x1, y1) = a, b
        if x0 < 0:
            return math.log(rho_wts[(x0, y0)]) if y1 == y0 else 0.0
        return math.log(kappa_wts[(x0, y0)])

    return _measure_from_edge_logwt(p, m, edge_logwt)


def bg_weights_from_cascade(fields, n: int, l: int) -> tuple[dict, dict]:
    """Branch/merge weights mapped from a diamond weight cascade (levels n..1).

    beta[x,y]  = a / (a+b) at level n+x+1, entry (l+x+1, -y);
    gamma[x,y] = a + b     at level n-x,   entry (l+1,   -y).
    """
    p, m = n - l + 1, l
    beta_wts, gamma_wts = {}, {}
    for (x, y) in hybrid_vertices(p, m):
        if x < 0:
            f = fields[n - (n + x + 1)]
            a = f.a[l + x, -y - 1]
            b = f.b[l + x, -y - 1]
            beta_wts[(x, y)] = a / (a + b)
        elif x <= p - 2 and -y <= n - x:
            # right edge exists; its level n-x satisfies row l+1 <= level
            f = fields[x]
            gamma_wts[(x, y)] = f.a[l, -y - 1] + f.b[l, -y - 1]
    return beta_wts, gamma_wts


def glg_weights_from_cascade(fields, n: int, l: int) -> tuple[dict, dict]:
    """Merge/branch weights mapped from a cascade: rho[x,y] = a at level
    n+x+1 entry (-y, l+x+1); kappa[x,y] = 1/b at level n-x entry (-y, l)."""
    p, m = n - l + 1, l
    rho_wts, kappa_wts = {}, {}
    for (x, y) in hybrid_vertices(p, m):
        if x < 0:
            f = fields[n - (n + x + 1)]
            rho_wts[(x, y)] = f.a[-y - 1, l + x]
        else:
            f = fields[x]
            if -y <= f.level:
                kappa_wts[(x, y)] = 1.0 / f.b[-y - 1, l - 1]
    return rho_wts, kappa_wts


# --- Beta random walk in random environment ------------------------------------

def beta_rwre(params: ParamSet, T: int, rng: RngStream, env=None) -> np.ndarray:
    """One walk trajectory X_0..X_T on the negative integers.

    From X_t = y the walk stays with probability B ~ Beta(psi_{-y} +
    theta_{t+1}, phi_{-y-t-1} - theta_{t+1}) and steps to y-1 otherwise.
    Each site-time pair is visited at most once, so drawing B lazily gives
    the correct annealed trajectory; ``env`` (a callable (y, t) -> B)
    overrides the draw for quenched or degenerate tests.
    """
    xs = np.empty(T + 1, dtype=np.int64)
    xs[0] = -1
    y = -1
    for t in range(T):
        if env is not None:
            b = float(env(y, t))
        else:
            alpha = params.psi_at(-y) + params.theta_at(t + 1)
            beta = params.phi_at(-y - t - 1) - params.theta_at(t + 1)
            b = sample_beta(rng, BetaParams(alpha, beta))
        if rng.uniform() >= b:
            y -= 1
        xs[t + 1] = y
    return xs


def beta_rwre_endpoints_batch(alpha: float, beta: float, T: int, rng: RngStream,
                              replicas: int) -> np.ndarray:
    """Annealed endpoints -X_T for homogeneous parameters, one fresh
    environment per replica (each visited cell draws a fresh Beta)."""
    y = np.full(replicas, -1, dtype=np.int64)
    for _ in range(T):
        b = rng.generator.beta(alpha, beta, size=replicas)
        y -= (rng.uniform(replicas) >= b).astype(np.int64)
    return -y


# --- stationary single-path polymers ---------------------------------------------

@dataclass
class StatPolymerEnv:
    """A stationary polymer environment with its log partition table.

    kind "inv-gamma": point weights log_y on (m+1) x (n+1);
    kind "strict-weak": horizontal edge weights log_y on (m, n+1) plus
    boundary vertical weights log_r on (n,), bulk verticals weight 1.
    log_z[i, j] is the point-to-point partition function from the origin.
    """
    kind: str
    m: int
    n: int
    alpha: float
    beta: float
    log_y: np.ndarray
    log_z: np.ndarray
    log_r: np.ndarray | None = None

    def check_cell(self, i: int, j: int) -> float:
        """Recompute log_z[i, j] from its predecessors (consistency probe)."""
        if self.kind == "inv-gamma":
            if i == 0:
                return self.log_y[..., 0, j] + self.log_z[..., 0, j - 1]
            if j == 0:
                return self.log_y[..., i, 0] + self.log_z[..., i - 1, 0]
            return self.log_y[..., i, j] + np.logaddexp(
                self.log_z[..., i - 1, j], self.log_z[..., i, j - 1])
        if i == 0:
            return self.log_r[..., j - 1] + self.log_z[..., 0, j - 1]
        if j == 0:
            return self.log_y[..., i - 1, 0] + self.log_z[..., i - 1, 0]
        vert = self.log_z[..., i, j - 1]  # bulk vertical edges weight 1
        horiz = self.log_y[..., i - 1, j] + self.log_z[..., i - 1, j]
        return np.logaddexp(horiz, vert)


def stat_loggamma(m: int, n: int, alpha: float, beta: float, rng: RngStream,
                  replicas: tuple = ()) -> StatPolymerEnv:
    """Inverse-Gamma point-weight environment with stationary boundary.

    Y ~ 1/Gamma(beta,1) on the bottom row, 1/Gamma(alpha,1) on the left
    column, 1/Gamma(alpha+beta,1) in the bulk, Y_00 = 1; log Z filled by
    the up-right recursion.  ``replicas`` prepends batch axes.
    """
    shp = np.full((m + 1, n + 1), alpha + beta)
    shp[:, 0] = beta
    shp[0, :] = alpha
    pre = tuple(replicas)
    log_y = -log_gamma_draw(rng, shp, size=pre + (m + 1, n + 1))
    log_y[..., 0, 0] = 0.0
    log_z = np.empty(pre + (m + 1, n + 1))
    log_z[..., 0, 0] = 0.0
    log_z[..., 1:, 0] = np.cumsum(log_y[..., 1:, 0], axis=-1)
    log_z[..., 0, 1:] = np.cumsum(log_y[..., 0, 1:], axis=-1)
    # anti-diagonal wavefront keeps the inner work vectorized at large sizes
    for d in range(2, m + n + 1):
        ii = np.arange(max(1, d - n), min(m, d - 1) + 1)
        if ii.size == 0:
            continue
        jj = d - ii
        log_z[..., ii, jj] = log_y[..., ii, jj] + np.logaddexp(
            log_z[..., ii - 1, jj], log_z[..., ii, jj - 1])
    return StatPolymerEnv("inv-gamma", m, n, alpha, beta, log_y, log_z)


def stat_strictweak(m: int, n: int, alpha: float, beta: float, rng: RngStream,
                    replicas: tuple = ()) -> StatPolymerEnv:
    """Gamma horizontal-edge environment with inverse-Beta boundary verticals.

    Horizontal edge (i,j)->(i+1,j): Gamma(alpha+beta,1) on the bottom row,
    Gamma(alpha,1) above; vertical edges weight 1 except the boundary
    column (0,j)->(0,j+1) which carries 1/Beta(beta, alpha).
    """
    shp = np.full((m, n + 1), alpha)
    shp[:, 0] = alpha + beta
    pre = tuple(replicas)
    log_y = log_gamma_draw(rng, shp, size=pre + (m, n + 1))
    lb = log_gamma_draw(rng, np.full((n,), beta), size=pre + (n,))
    la = log_gamma_draw(rng, np.full((n,), alpha), size=pre + (n,))
    log_r = np.logaddexp(lb, la) - lb     # log of 1/Beta(beta, alpha)
    log_z = np.empty(pre + (m + 1, n + 1))
    log_z[..., 0, 0] = 0.0
    log_z[..., 1:, 0] = np.cumsum(log_y[..., :, 0], axis=-1)
    log_z[..., 0, 1:] = np.cumsum(log_r, axis=-1)
    for d in range(2, m + n + 1):
        ii = np.arange(max(1, d - n), min(m, d - 1) + 1)
        if ii.size == 0:
            continue
        jj = d - ii
        horiz = log_y[..., ii - 1, jj] + log_z[..., ii - 1, jj]
        vert = log_z[..., ii, jj - 1]
        log_z[..., ii, jj] = np.logaddexp(horiz, vert)
    return StatPolymerEnv("strict-weak", m, n, alpha, beta, log_y, log_z, log_r)


def path_log_weight(env: StatPolymerEnv, points) -> float:
    """Quenched log weight of an up-right path given as its point list."""
    if env.kind == "inv-gamma":
        return float(sum(env.log_y[i, j] for i, j in points))
    lw = 0.0
    for (i0, j0), (i1, j1) in zip(points, points[1:]):
        if i1 == i0 + 1:
            lw += float(env.log_y[i0, j0])
        elif i0 == 0:
            lw += float(env.log_r[j0])
    return lw


def quenched_path_law(env: StatPolymerEnv, endpoint=None) -> dict:
    """Exact quenched law over paths to ``endpoint`` as step-string -> prob.

    Enumerates all up-right paths; intended for small tables only.
    """
    m, n = (env.m, env.n) if endpoint is None else endpoint
    if math.comb(m + n, n) > 4096:
        raise ValueError("path enumeration too large")
    keys, logs = [], []

    def rec(i, j, steps, acc):
        if (i, j) == (m, n):
            keys.append("".join(steps))
            logs.append(path_log_weight(env, acc))
            return
        if i < m:
            rec(i + 1, j, steps + ["R"], acc + [(i + 1, j)])
        if j < n:
            rec(i, j + 1, steps + ["U"], acc + [(i, j + 1)])

    rec(0, 0, [], [(0, 0)])
    arr = np.array(logs)
    hi = arr.max()
    z = hi + np.log(np.exp(arr - hi).sum())
    return {k: float(np.exp(v - z)) for k, v in zip(keys, arr)}


def sample_path_backward(env: StatPolymerEnv, rng: RngStream,
                         endpoint=None) -> list[tuple[int, int]]:
    """One path from the quenched measure, sampled backward from the endpoint."""
    i, j = (env.m, env.n) if endpoint is None else endpoint
    pts = [(i, j)]
    while (i, j) != (0, 0):
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            if env.kind == "inv-gamma":
                lh = env.log_z[i - 1, j]
                lv = env.log_z[i, j - 1]
            else:
                lh = env.log_y[i - 1, j] + env.log_z[i - 1, j]
                lv = env.log_z[i, j - 1]
            p_h = 1.0 / (1.0 + math.exp(min(max(lv - lh, -700.0), 700.0)))
            if rng.uniform() < p_h:
                i -= 1
            else:
                j -= 1
        pts.append((i, j))
    return pts[::-1]


def x_mid_of_path(points, n: int) -> int:
    """x-coordinate of the unique path point on the line x + y = n."""
    on = [i for i, j in points if i + j == n]
    if not on:
        raise ValueError("path does not meet the line x + y = n")
    return on[0]


def xmid_batch(kind: str, n: int, alpha: float, beta: float, rng: RngStream,
               replicas: int, chunk: int = 64) -> np.ndarray:
    """Annealed x_mid samples at endpoint (n, n): fresh environment per
    replica, backward-sampled path, vectorized over replica chunks."""
    from . import fastpath

    if fastpath.HAVE_NUMBA:
        return _xmid_batch_jit(kind, n, alpha, beta, rng, replicas)
    out = np.empty(replicas, dtype=np.int64)
    done = 0
    maker = stat_loggamma if kind == "inv-gamma" else stat_strictweak
    while done < replicas:
        c = min(chunk, replicas - done)
        env = maker(n, n, alpha, beta, rng, replicas=(c,))
        ii = np.full(c, n)
        jj = np.full(c, n)
        xm = np.full(c, -1, dtype=np.int64)
        rows = np.arange(c)
        for _ in range(2 * n):
            hit = (ii + jj == n) & (xm < 0)
            xm[hit] = ii[hit]
            if env.kind == "inv-gamma":
                lh = env.log_z[rows, ii - 1, jj]
            else:
                lh = env.log_y[rows, ii - 1, jj] + env.log_z[rows, ii - 1, jj]
            lv = env.log_z[rows, ii, jj - 1]
            go_h = rng.uniform(c) < 1.0 / (1.0 + np.exp(np.clip(lv - lh, -700, 700)))
            go_h = np.where(jj == 0, True, np.where(ii == 0, False, go_h))
            ii = ii - go_h.astype(np.int64)
            jj = jj - (~go_h).astype(np.int64)
        hit = (ii + jj == n) & (xm < 0)
        xm[hit] = ii[hit]
        out[done:done + c] = xm
        done += c
    return out


def _xmid_batch_jit(kind: str, n: int, alpha: float, beta: float,
                    rng: RngStream, replicas: int) -> np.ndarray:
    from . import fastpath

    # one independent counter state per environment; thread-schedule free
    seeds = rng.generator.integers(0, 2**64, size=replicas, dtype=np.uint64)
    if kind == "inv-gamma":
        return fastpath.xmid_lg_seeded(n, alpha, beta, seeds)
    return fastpath.xmid_sw_seeded(n, alpha, beta, seeds)


def burke_ratios(env: StatPolymerEnv, m: int, n: int):
    """(U, V) = (Z_{m,n}/Z_{m-1,n}, Z_{m,n}/Z_{m,n-1}) in linear scale."""
    u = np.exp(env.log_z[..., m, n] - env.log_z[..., m - 1, n])
    v = np.exp(env.log_z[..., m, n] - env.log_z[..., m, n - 1])
    return u, v


# --- boundary-weighted dual polymer ----------------------------------------------

@dataclass
class EdgeGammaMeasure:
    """Exact quenched measure of the dual single-path model of size n.

    Paths run over n+1 half-integer columns from height y0 in {-1..-n-1}
    up-right to height -1; the weight is the product of reciprocal bulk
    weights over interior columns times prod_{j<=-y0-1} a_j/b_j.
    """
    n: int
    patterns: list          # tuples of n bools (True = up-right step)
    log_weights: np.ndarray
    log_z: float

    @property
    def probs(self):
        return np.exp(self.log_weights - self.log_z)

    def endpoint_y(self, idx: int) -> int:
        return -1 - int(sum(self.patterns[idx]))

    def endpoint_law(self) -> dict:
        out: dict = {}
        for idx, pr in enumerate(self.probs):
            y = self.endpoint_y(idx)
            out[y] = out.get(y, 0.0) + float(pr)
        return out


def edge_gamma_polymer(n: int, gamma_wts: dict, a_bdry, b_bdry) -> EdgeGammaMeasure:
    """Enumerate the dual polymer: gamma_wts keyed by (x, y) with x in
    0..n-2, plus boundary sequences a_j, b_j (1-based lists)."""
    if n > 8:
        raise ValueError("dual-path enumeration limited to n <= 8")
    patterns = []
    logs = []
    log_ab = [math.log(a_bdry[j]) - math.log(b_bdry[j]) for j in range(n)]
    for bits in range(1 << n):
        ups = [(bits >> c) & 1 == 1 for c in range(n)]
        u = sum(ups)
        y0 = -1 - u
        lw = sum(log_ab[: -y0 - 1])
        y = y0
        ok = True
        for c in range(n):
            if ups[c]:
                y += 1
            if 1 <= c <= n - 1 and c != n:
                pass
            if c < n - 1:
                # interior column c+1 sits at x = c
                if (c, y) not in gamma_wts:
                    ok = False
                    break
                lw -= math.log(gamma_wts[(c, y)])
        if not ok or y != -1:
            continue
        patterns.append(tuple(ups))
        logs.append(lw)
    arr = np.array(logs)
    hi = arr.max()
    log_z = float(hi + np.log(np.sum(np.exp(arr - hi))))
    return EdgeGammaMeasure(n, patterns, arr, log_z)


def edge_gamma_weights_from_cascade(fields, n: int) -> tuple[dict, list, list]:
    """Dual-polymer weights mapped from a cascade: gamma[x,y] = a + b at
    level n-x entry (2, -y); boundaries a_j, b_j from the level-n field."""
    gamma_wts = {}
    for x in range(0, n - 1):
        f = fields[x]          # level n-x
        for j in range(1, f.level + 1):
            gamma_wts[(x, -j)] = f.a[1, j - 1] + f.b[1, j - 1]
    a_bdry = [float(fields[0].a[0, j]) for j in range(n)]
    b_bdry = [float(fields[0].b[0, j]) for j in range(n)]
    return gamma_wts, a_bdry, b_bdry


def edge_gamma_sample_endpoints(n: int, params: ParamSet, rng: RngStream,
                                replicas: int) -> np.ndarray:
    """Annealed endpoint labels -y0 - 1, one fresh environment per replica.

    Bulk shapes follow the level-consistent law Gamma(psi_{-y} +
    phi_{x-y-n}, 1); boundary a_j ~ Gamma(psi_j + theta_1), b_j ~
    Gamma(phi_{j-n} - theta_1).
    """
    if n > 8:
        raise ValueError("dual-path sampling limited to n <= 8")
    a_shp = np.array([params.a_shape(1, j) for j in range(1, n + 1)])
    b_shp = np.array([params.b_shape(1, j, n) for j in range(1, n + 1)])
    bulk_keys = [(x, -j) for x in range(0, n - 1) for j in range(1, n - x + 1)]
    bulk_shp = np.array([params.psi_at(-y) + params.phi_at(x - y - n)
                         for x, y in bulk_keys])
    pats = [[(bits >> c) & 1 == 1 for c in range(n)] for bits in range(1 << n)]
    out = np.empty(replicas, dtype=np.int64)
    for r in range(replicas):
        la = log_gamma_draw(rng, a_shp)
        lb = log_gamma_draw(rng, b_shp)
        lg = dict(zip(bulk_keys, log_gamma_draw(rng, bulk_shp)))
        logs, ys = [], []
        for ups in pats:
            y = y0 = -1 - sum(ups)
            lw = float(np.sum(la[: -y0 - 1] - lb[: -y0 - 1]))
            ok = True
            for c in range(n):
                if ups[c]:
                    y += 1
                if c < n - 1:
                    if (c, y) not in lg:
                        ok = False
                        break
                    lw -= float(lg[(c, y)])
            if ok and y == -1:
                logs.append(lw)
                ys.append(-y0 - 1)
        arr = np.array(logs)
        pr = np.exp(arr - arr.max())
        pr /= pr.sum()
        out[r] = ys[int(rng.generator.choice(len(ys), p=pr))]
    return out


# --- crossing statistics -----------------------------------------------------------

@dataclass
class CrossingStats:
    x_mid: int
    v0: int
    v1: int
    w0: int
    w1: int

    def __post_init__(self):
        if self.v0 > self.v1 or self.w0 > self.w1:
            raise ValueError("crossing records must be ordered")


def crossings(points, n: int, ell: int, k: int) -> CrossingStats:
    """Crossing record of an up-right path: extreme x on the line y = ell,
    extreme y on the line x = k, and the antidiagonal crossing x_mid."""
    vs = [i for i, j in points if j == ell]
    ws = [j for i, j in points if i == k]
    if not vs or not ws:
        raise ValueError("requested line not crossed by the path")
    return CrossingStats(
        x_mid=x_mid_of_path(points, n),
        v0=min(vs), v1=max(vs), w0=min(ws), w1=max(ws),
    )


def random_upright_path(m: int, n: int, rng: RngStream) -> list[tuple[int, int]]:
    """A uniformly random up-right path (0,0) -> (m,n) (for property tests)."""
    steps = np.zeros(m + n, dtype=bool)
    steps[rng.generator.choice(m + n, size=m, replace=False)] = True
    pts = [(0, 0)]
    i = j = 0
    for s in steps:
        if s:
            i += 1
        else:
            j += 1
        pts.append((i, j))
    return pts


def stationarity_restriction_check(M: int, N: int, m: int, n: int, alpha: float,
                                   beta: float, reps: int, rng: RngStream) -> dict:
    """Two-sample comparison of a big path restricted to its top-right
    m x n box against an independent small-box path interior.

    Returns sample counts keyed by the restricted point sets (shifted to
    the small box coordinates) for both sides; fresh environments per
    sample on both sides.
    """
    if not (1 <= m <= M and 1 <= n <= N):
        raise ValueError("need 1 <= m <= M and 1 <= n <= N")
    big_counts: dict = {}
    small_counts: dict = {}
    for _ in range(reps):
        env = stat_loggamma(M, N, alpha, beta, rng)
        pts = sample_path_backward(env, rng)
        key = frozenset((i - (M - m), j - (N - n)) for i, j in pts
                        if i >= M - m + 1 and j >= N - n + 1)
        big_counts[key] = big_counts.get(key, 0) + 1
        env2 = stat_loggamma(m, n, alpha, beta, rng)
        pts2 = sample_path_backward(env2, rng)
        key2 = frozenset((i, j) for i, j in pts2 if i >= 1 and j >= 1)
        small_counts[key2] = small_counts.get(key2, 0) + 1
    return {"big": big_counts, "small": small_counts}
