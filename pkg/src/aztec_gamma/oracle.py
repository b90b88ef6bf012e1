"""Exhaustive enumeration oracles and small-graph transforms.

Everything here is exact and deliberately brute-force: dimer measures are
enumerated matching by matching (bitmask-guarded; level-6 diamonds are the
practical ceiling), and the local moves (square move, vertex dilation,
column commutation) are checked against those enumerations in the test
suite.

The swap graphs reorganize the diamond into a block of branch columns
followed by a block of merge columns around one observation column; their
matchings biject with tuples of nonintersecting lattice paths, which is how
the slice statistics of the dimer model are matched with polymer models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .matching import DL, DR, UL, UR, Matching
from .polymers import PathTuple
from .weights import WeightField, b_column_zero

# hard cap from the used-black bitmask; level-6 diamonds (42 whites, 2^21
# matchings) are the practical ceiling for exhaustive runs
ENUM_VERTEX_GUARD = 64


class NoPerfectMatchingError(RuntimeError):
    """The graph admits no perfect matching (partition function zero)."""


class EnumerationSizeError(ValueError):
    pass


@dataclass
class BipartiteGraph:
    """A small weighted bipartite graph with hashable vertex ids."""
    whites: list
    blacks: list
    edges: list  # (white_id, black_id, weight)
    pos: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for w, b, wt in self.edges:
            if wt <= 0:
                raise ValueError(f"edge ({w},{b}) has nonpositive weight {wt}")
            if (w, b) in seen:
                raise ValueError(f"duplicate edge ({w},{b})")
            seen.add((w, b))
        wset, bset = set(self.whites), set(self.blacks)
        for w, b, _ in self.edges:
            if w not in wset or b not in bset:
                raise ValueError(f"edge ({w},{b}) references unknown vertex")

    def weight_of(self, w, b) -> float:
        for ww, bb, wt in self.edges:
            if ww == w and bb == b:
                return wt
        raise KeyError((w, b))

    def to_json(self) -> str:
        import json
        return json.dumps({
            "white": [repr(w) for w in self.whites],
            "black": [repr(b) for b in self.blacks],
            "edges": [[repr(w), repr(b), wt] for w, b, wt in self.edges],
        })


@dataclass
class ExactMeasure:
    """All perfect matchings of a graph with exact probabilities.

    Matchings are stored as tuples assigning a black index to each white
    (in ``graph.whites`` order); probabilities are computed in log domain
    and sum to one.
    """
    graph: BipartiteGraph
    matchings: list            # list of tuples white-index -> black-index
    log_weights: np.ndarray
    log_z: float

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_weights - self.log_z)

    def pairs(self, idx: int) -> list:
        assign = self.matchings[idx]
        return [(self.graph.whites[wi], self.graph.blacks[bi])
                for wi, bi in enumerate(assign)]

    def pushforward(self, func) -> dict:
        """Exact distribution of func(matched pairs) under the dimer measure."""
        out: dict = {}
        for idx, p in enumerate(self.probs):
            key = func(self.pairs(idx))
            out[key] = out.get(key, 0.0) + float(p)
        return out


def _prepare(g: BipartiteGraph):
    nw, nb = len(g.whites), len(g.blacks)
    if nw != nb:
        raise NoPerfectMatchingError(f"unbalanced graph ({nw} white, {nb} black)")
    if nw > ENUM_VERTEX_GUARD:
        raise EnumerationSizeError(f"{nw} whites exceeds enumeration guard")
    bidx = {b: i for i, b in enumerate(g.blacks)}
    widx = {w: i for i, w in enumerate(g.whites)}
    adj = [[] for _ in range(nw)]
    for w, b, wt in g.edges:
        adj[widx[w]].append((bidx[b], math.log(wt)))
    order = sorted(range(nw), key=lambda i: len(adj[i]))
    return adj, order


def enumerate_matchings(g: BipartiteGraph, store: bool = True) -> ExactMeasure:
    """Depth-first enumeration of all perfect matchings with exact log Z.

    Whites are processed in degree-ascending order with used-black
    forward-checking.  Raises NoPerfectMatchingError when Z = 0.
    """
    adj, order = _prepare(g)
    nw = len(adj)
    matchings: list = []
    log_weights: list = []
    assign = [0] * nw

    def dfs(depth: int, used: int, logw: float):
        if depth == nw:
            if store:
                matchings.append(tuple(assign))
            log_weights.append(logw)
            return
        wi = order[depth]
        for bi, lw in adj[wi]:
            bit = 1 << bi
            if used & bit:
                continue
            assign[wi] = bi
            dfs(depth + 1, used | bit, logw + lw)

    dfs(0, 0, 0.0)
    if not log_weights:
        raise NoPerfectMatchingError("graph has no perfect matching")
    arr = np.array(log_weights)
    hi = arr.max()
    log_z = float(hi + np.log(np.sum(np.exp(arr - hi))))
    return ExactMeasure(g, matchings, arr, log_z)


def enumerate_log_z(g: BipartiteGraph) -> float:
    from . import fastpath

    if not fastpath.HAVE_NUMBA:
        return enumerate_matchings(g, store=False).log_z
    adj, order = _prepare(g)
    offsets = np.zeros(len(adj) + 1, dtype=np.int64)
    blk, lwt = [], []
    for wi, lst in enumerate(adj):
        offsets[wi + 1] = offsets[wi] + len(lst)
        for bi, lw in lst:
            blk.append(bi)
            lwt.append(lw)
    lz = fastpath.logz_dfs(offsets, np.array(blk, dtype=np.int64),
                           np.array(lwt), np.array(order, dtype=np.int64))
    if lz == -np.inf:
        raise NoPerfectMatchingError("graph has no perfect matching")
    return float(lz)


# --- the diamond as a graph -----------------------------------------------------

def aztec_graph(w: WeightField) -> BipartiteGraph:
    """The size-n diamond graph with vertex ids ('w', l, k) and ('b', i, j)."""
    n = w.level
    whites = [("w", l, k) for l in range(1, n + 1) for k in range(1, n + 2)]
    blacks = [("b", i, j) for i in range(1, n + 2) for j in range(1, n + 1)]
    edges = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            edges.append((("w", i, j), ("b", i, j), float(w.a[i - 1, j - 1])))
            edges.append((("w", i, j + 1), ("b", i, j), float(w.b[i - 1, j - 1])))
    for l in range(1, n + 1):
        for k in range(1, n + 2):
            if k <= n:
                edges.append((("w", l, k), ("b", l + 1, k), 1.0))
            if k >= 2:
                edges.append((("w", l, k), ("b", l + 1, k - 1), 1.0))
    return BipartiteGraph(whites, blacks, edges)


def pairs_to_matching(n: int, pairs) -> Matching:
    """Convert matched ('w',l,k)/('b',i,j) pairs into a direction grid."""
    grid = np.zeros((n, n + 1), dtype=np.int8)
    for (_, l, k), (_, i, j) in pairs:
        if i == l and j == k:
            grid[l - 1, k - 1] = DL
        elif i == l and j == k - 1:
            grid[l - 1, k - 1] = UL
        elif i == l + 1 and j == k:
            grid[l - 1, k - 1] = DR
        elif i == l + 1 and j == k - 1:
            grid[l - 1, k - 1] = UR
        else:
            raise ValueError(f"non-adjacent pair w({l},{k})-b({i},{j})")
    return Matching(n, grid)


def aztec_measure(w: WeightField) -> dict[bytes, float]:
    """Exact dimer measure keyed by direction-grid bytes."""
    meas = enumerate_matchings(aztec_graph(w))
    out: dict[bytes, float] = {}
    for idx, p in enumerate(meas.probs):
        out[pairs_to_matching(w.level, meas.pairs(idx)).key()] = float(p)
    return out


# --- square move ------------------------------------------------------------------

def _square_edges(g: BipartiteGraph, square):
    """Locate the inner 4-cycle and the four pendant partners.

    ``square`` = (top, left, right, bottom) inner vertex ids.  The inner
    edges are left-top (w), top-right (x), bottom-left (y), bottom-right
    (z); each inner vertex must have exactly one weight-1 edge to a vertex
    outside the square.
    """
    top, left, right, bottom = square
    inner = {top, left, right, bottom}
    incident = {v: [] for v in inner}
    for w, b, wt in g.edges:
        if w in inner:
            incident[w].append((b, wt))
        if b in inner:
            incident[b].append((w, wt))

    def inner_weight(u, v):
        for other, wt in incident[u]:
            if other == v:
                return wt
        raise ValueError(f"square pattern missing edge {u}-{v}")

    wts = {
        "w": inner_weight(left, top),
        "x": inner_weight(top, right),
        "y": inner_weight(bottom, left),
        "z": inner_weight(bottom, right),
    }
    partners = {}
    for v in inner:
        outside = [(o, wt) for o, wt in incident[v] if o not in inner]
        if len(outside) != 1 or abs(outside[0][1] - 1.0) > 1e-12:
            raise ValueError(f"inner vertex {v} needs exactly one weight-1 tentacle")
        partners[v] = outside[0][0]
    return wts, partners


def spider_move(g: BipartiteGraph, square) -> tuple[BipartiteGraph, float]:
    """Contract an inner square pattern, returning (g', log Z factor).

    Z_g = (wz + xy) * Z_g', where the new direct edges between the former
    tentacle endpoints carry the opposite-side weights divided by wz + xy.
    """
    top, left, right, bottom = square
    wts, partners = _square_edges(g, square)
    denom = wts["w"] * wts["z"] + wts["x"] * wts["y"]
    inner = {top, left, right, bottom}
    new_edges = [(w, b, wt) for w, b, wt in g.edges
                 if w not in inner and b not in inner]
    wset = set(g.whites)

    def add(u, v, wt):
        if u in wset:
            new_edges.append((u, v, wt))
        else:
            new_edges.append((v, u, wt))

    add(partners[left], partners[top], wts["z"] / denom)
    add(partners[top], partners[right], wts["y"] / denom)
    add(partners[bottom], partners[left], wts["x"] / denom)
    add(partners[bottom], partners[right], wts["w"] / denom)
    g2 = BipartiteGraph([w for w in g.whites if w not in inner],
                        [b for b in g.blacks if b not in inner],
                        new_edges, dict(g.pos))
    return g2, math.log(denom)


def spider_coupling(g: BipartiteGraph, square):
    """The measure-preserving transport from matchings of g to the contracted graph.

    Returns (g', transport) where transport maps a frozenset of matched
    pairs of g to a list of (frozenset of matched pairs of g', probability).
    Deletion and slide cases are deterministic; the doubly-pendant case
    branches with probabilities wz/(wz+xy) and xy/(wz+xy).
    """
    top, left, right, bottom = square
    wts, partners = _square_edges(g, square)
    g2, _ = spider_move(g, square)
    denom = wts["w"] * wts["z"] + wts["x"] * wts["y"]
    inner = {top, left, right, bottom}
    wset = set(g.whites)

    def pair(u, v):
        return (u, v) if u in wset else (v, u)

    inner_pairs = {
        "w": pair(left, top), "x": pair(top, right),
        "y": pair(bottom, left), "z": pair(bottom, right),
    }
    pendant = {v: pair(v, partners[v]) for v in inner}
    new_pair = {
        "w": pair(partners[left], partners[top]),
        "x": pair(partners[top], partners[right]),
        "y": pair(partners[bottom], partners[left]),
        "z": pair(partners[bottom], partners[right]),
    }
    opposite = {"w": "z", "x": "y", "y": "x", "z": "w"}

    def transport(pairs: frozenset):
        outside = frozenset(p for p in pairs
                            if p[0] not in inner and p[1] not in inner)
        local = pairs - outside
        inner_used = [name for name, pr in inner_pairs.items() if pr in local]
        if len(inner_used) == 2:            # deletion: opposite pair vanishes
            return [(outside, 1.0)]
        if len(inner_used) == 1:            # slide: edge jumps to the opposite side
            name = inner_used[0]
            return [(outside | {new_pair[opposite[name]]}, 1.0)]
        # all four pendants matched: create one of the two diagonal pairs
        p_wz = wts["w"] * wts["z"] / denom
        return [
            (outside | {new_pair["w"], new_pair["z"]}, p_wz),
            (outside | {new_pair["x"], new_pair["y"]}, 1.0 - p_wz),
        ]

    return g2, transport


# --- vertex dilation ----------------------------------------------------------------

def vertex_expand(g: BipartiteGraph, v, split) -> BipartiteGraph:
    """Split vertex v into two copies joined through a new middle vertex.

    ``split`` is the set of neighbor ids whose edges move to the new copy
    ("exp", v); the rest stay on v.  The middle vertex ("mid", v) gets
    weight-1 edges to both copies; Z and the matching count are unchanged.
    """
    split = set(split)
    neighbors = set()
    for w, b, wt in g.edges:
        if w == v:
            neighbors.add(b)
        elif b == v:
            neighbors.add(w)
    if not split <= neighbors:
        raise ValueError("split must be a subset of the neighbors of v")
    is_white = v in set(g.whites)
    copy_id, mid_id = ("exp", v), ("mid", v)
    new_edges = []
    for w, b, wt in g.edges:
        if w == v and b in split:
            new_edges.append((copy_id, b, wt))
        elif b == v and w in split:
            new_edges.append((w, copy_id, wt))
        else:
            new_edges.append((w, b, wt))
    if is_white:
        whites = list(g.whites) + [copy_id]
        blacks = list(g.blacks) + [mid_id]
        new_edges += [(v, mid_id, 1.0), (copy_id, mid_id, 1.0)]
    else:
        whites = list(g.whites) + [mid_id]
        blacks = list(g.blacks) + [copy_id]
        new_edges += [(mid_id, v, 1.0), (mid_id, copy_id, 1.0)]
    return BipartiteGraph(whites, blacks, new_edges, dict(g.pos))


def vertex_contract(g: BipartiteGraph, mid, into) -> BipartiteGraph:
    """Inverse of vertex_expand: remove the 2-valent middle vertex ``mid``
    and merge its two neighbors into the single vertex ``into``."""
    nbrs = []
    for w, b, wt in g.edges:
        if w == mid:
            nbrs.append((b, wt))
        elif b == mid:
            nbrs.append((w, wt))
    if len(nbrs) != 2 or any(abs(wt - 1.0) > 1e-12 for _, wt in nbrs):
        raise ValueError("mid must be 2-valent with weight-1 edges")
    merged = {nbrs[0][0], nbrs[1][0]}
    mid_white = mid in set(g.whites)
    new_edges = []
    for w, b, wt in g.edges:
        if mid in (w, b):
            continue
        if w in merged:
            w = into
        if b in merged:
            b = into
        new_edges.append((w, b, wt))
    if mid_white:
        whites = [w for w in g.whites if w != mid]
        blacks = [b for b in g.blacks if b not in merged] + [into]
    else:
        whites = [w for w in g.whites if w not in merged] + [into]
        blacks = [b for b in g.blacks if b != mid]
    return BipartiteGraph(whites, blacks, new_edges, dict(g.pos))


# --- column chains and swap graphs ------------------------------------------------
#
# The diamond, after vertex dilation and gauge moves, becomes a chain of
# branch columns (one black fans out to two whites) and merge columns (two
# whites feed one black) between two layers of pendant caps.  Commuting a
# branch/merge pair is the local move behind the shuffle; pushing all pairs
# to opposite sides of one observation column yields the swap graphs whose
# matchings are path tuples.

FRESH = ("fresh",)
DROP = ("drop",)


@dataclass
class BranchCol:
    up: list            # weight on the up edge of branch vertex r = 1..m
    flat: list          # weight on the flat edge
    seg: tuple | None = None      # ("x", x_pol) left-half segment tagging
    frozen_connector: bool = False
    sentinel: bool = False        # branch edges provably never matched


@dataclass
class MergeCol:
    out: list | None    # out-edge weights (None: terminal column, no out edges)
    up_in: list
    flat_in: list
    seg: tuple | None = None
    frozen_out: bool = False
    sentinel_out: bool = False


@dataclass
class ChainGraph:
    graph: BipartiteGraph
    tags: dict                      # frozenset({u,v}) -> ((x0,y0),(x1,y1))
    frozen: list                    # frozenset pairs contained in every matching
    sentinel: list                  # frozenset pairs contained in no matching
    interface: list | None = None   # observation pass layer, top to bottom
    p: int = 0
    m: int = 0

    def measure(self) -> ExactMeasure:
        return enumerate_matchings(self.graph)


def build_chain(cap_weights, cols, flip_colors: bool = False,
                interface_after: int | None = None) -> ChainGraph:
    """Assemble a cap/column/cap chain into a bipartite graph.

    ``cap_weights`` is None for a bare start (first column exposes its
    branch vertices directly) or the list of left cap edge weights.
    ``cols`` mixes BranchCol/MergeCol specs with the FRESH and DROP
    markers; ``interface_after`` records the pass layer emitted by the
    column with that index (0-based) as the observation layer.  Right caps
    (weight 1) close the chain unless the last column is terminal.
    """
    whites: list = []
    blacks: list = []
    edges: list = []
    tags: dict = {}
    frozen: list = []
    sentinel: list = []
    interface = None

    pass_layer: list | None = None
    if cap_weights is not None:
        outer = [("CL", r) for r in range(len(cap_weights))]
        inner = [("CLP", r) for r in range(len(cap_weights))]
        blacks += outer
        whites += inner
        for o, i, wt in zip(outer, inner, cap_weights):
            edges.append((i, o, float(wt)))
            frozen.append(frozenset((i, o)))
        pass_layer = inner

    terminal = False
    for c, col in enumerate(cols):
        if col == FRESH:
            v = ("P", c, 0)
            whites.append(v)
            pass_layer = [v]
            continue
        if col == DROP:
            pass_layer = None
            continue
        if isinstance(col, BranchCol):
            mcount = len(col.up)
            if pass_layer is not None and len(pass_layer) != mcount:
                raise ValueError(f"column {c}: branch width mismatch")
            branch = [("B", c, r) for r in range(mcount)]
            out_pass = [("P", c, r) for r in range(mcount + 1)]
            blacks += branch
            whites += out_pass
            for r in range(mcount):
                if pass_layer is not None:
                    pr = frozenset((pass_layer[r], branch[r]))
                    edges.append((pass_layer[r], branch[r], 1.0))
                    if col.frozen_connector:
                        frozen.append(pr)
                e_up = (out_pass[r], branch[r], float(col.up[r]))
                e_flat = (out_pass[r + 1], branch[r], float(col.flat[r]))
                edges += [e_up, e_flat]
                if col.seg is not None:
                    xp = col.seg[1]
                    row = r + 1
                    tags[frozenset((out_pass[r], branch[r]))] = \
                        ((xp, -row), (xp + 1, -row))
                    tags[frozenset((out_pass[r + 1], branch[r]))] = \
                        ((xp, -row), (xp + 1, -row - 1))
                if col.sentinel:
                    sentinel.append(frozenset((out_pass[r], branch[r])))
                    sentinel.append(frozenset((out_pass[r + 1], branch[r])))
            pass_layer = out_pass
        elif isinstance(col, MergeCol):
            mcount = len(col.up_in)
            if pass_layer is None or len(pass_layer) != mcount + 1:
                raise ValueError(f"column {c}: merge width mismatch")
            merge = [("G", c, r) for r in range(mcount)]
            blacks += merge
            for r in range(mcount):
                edges.append((pass_layer[r], merge[r], float(col.flat_in[r])))
                edges.append((pass_layer[r + 1], merge[r], float(col.up_in[r])))
                if col.seg is not None:
                    xp = col.seg[1]
                    row = r + 1
                    tags[frozenset((pass_layer[r + 1], merge[r]))] = \
                        ((xp, -row), (xp, -row - 1))
            if col.out is None:
                terminal = True
                pass_layer = None
            else:
                out_pass = [("P", c, r) for r in range(mcount)]
                whites += out_pass
                for r in range(mcount):
                    pr = frozenset((out_pass[r], merge[r]))
                    edges.append((out_pass[r], merge[r], float(col.out[r])))
                    if col.seg is not None and not col.sentinel_out:
                        xp = col.seg[1]
                        tags[pr] = ((xp, -(r + 1)), (xp + 1, -(r + 1)))
                    if col.frozen_out:
                        frozen.append(pr)
                    if col.sentinel_out:
                        sentinel.append(pr)
                pass_layer = out_pass
        else:
            raise TypeError(f"unknown column spec {col!r}")
        if interface_after is not None and c == interface_after:
            interface = list(pass_layer) if pass_layer else None

    if not terminal and pass_layer:
        caps = [("CR", r) for r in range(len(pass_layer))]
        blacks += caps
        for v, o in zip(pass_layer, caps):
            edges.append((v, o, 1.0))
            frozen.append(frozenset((v, o)))

    if flip_colors:
        whites, blacks = blacks, whites
        edges = [(b, w, wt) for (w, b, wt) in edges]
    g = BipartiteGraph(whites, blacks, edges)
    return ChainGraph(g, tags, frozen, sentinel, interface)


def _level(fields, k: int):
    f = fields[fields[0].level - k]
    assert f.level == k
    return f


def aztec_vert_graph(fields, swap_pair: int | None = None) -> ChainGraph:
    """The alternating branch/merge chain form of the size-n diamond.

    ``fields`` is the weight cascade at levels n..1.  With ``swap_pair`` =
    k (1-based), the k-th branch/merge pair is commuted using the column
    swap weight map, which leaves Z and all outside edge marginals intact.
    """
    from .weights import vswap_update

    n = fields[0].level
    f = fields[0]
    caps = [float(f.a[0, j] + f.b[0, j]) for j in range(n)]
    cols: list = []
    for i in range(1, n + 1):
        tot = f.a[i - 1] + f.b[i - 1]
        betas = (f.a[i - 1] / tot).tolist()
        if i < n:
            gammas = (f.a[i] + f.b[i]).tolist()
            gamma_sentinel = False
        else:
            gammas = [1.0] * n     # never matched: right caps force this column
            gamma_sentinel = True
        if swap_pair == i:
            g_hat, b_hat = vswap_update(np.array(betas), np.array(gammas))
            cols.append(MergeCol(out=g_hat.tolist(), up_in=[1.0] * (n - 1),
                                 flat_in=[1.0] * (n - 1)))
            cols.append(BranchCol(up=b_hat.tolist(),
                                  flat=(1.0 - b_hat).tolist()))
        else:
            cols.append(BranchCol(up=betas, flat=(1.0 - np.array(betas)).tolist()))
            cols.append(MergeCol(out=gammas, up_in=[1.0] * n, flat_in=[1.0] * n,
                                 sentinel_out=gamma_sentinel))
    return build_chain(caps, cols)


def build_vswap(fields, l: int, trimmed: bool = False) -> ChainGraph:
    """The vertical swap graph at observation column l (trimmed: bar form).

    Block structure: merge columns at levels n-1..n-l+1 (row 1 weights),
    branch columns at levels n-l+1..n (rows 1..l), merge columns at levels
    n..l (row l+1 weights), then branch columns with never-matched filler
    weights.  The trimmed form keeps only the middle component, whose
    matchings biject with p = n-l+1 nonintersecting paths.
    """
    n = fields[0].level
    if not 1 <= l <= n + 1:
        raise ValueError(f"observation column {l} outside 1..{n + 1}")
    p, m = n - l + 1, l
    cols: list = []
    interface_after = None
    if l == n + 1:
        if trimmed:
            raise ValueError("no trimmed form at l = n + 1")
        caps = [float(fields[0].a[0, j] + fields[0].b[0, j]) for j in range(n)]
        for i in range(1, n):
            f = _level(fields, n - i)
            out = (f.a[0] + f.b[0]).tolist()
            cols.append(MergeCol(out=out, up_in=[1.0] * (n - i),
                                 flat_in=[1.0] * (n - i), frozen_out=True))
        cols.append(DROP)
        cols.append(FRESH)
        for t in range(2, n + 1):
            w = t - 1
            cols.append(BranchCol(up=[1.0] * w, flat=[1.0] * w,
                                  frozen_connector=True, sentinel=True))
        return build_chain(caps, cols)

    caps = None if trimmed else [float(fields[0].a[0, j] + fields[0].b[0, j])
                                 for j in range(n)]
    if not trimmed:
        for i in range(1, l):
            f = _level(fields, n - i)
            out = (f.a[0] + f.b[0]).tolist()
            cols.append(MergeCol(out=out, up_in=[1.0] * (n - i),
                                 flat_in=[1.0] * (n - i), frozen_out=True))
    for t in range(1, l + 1):
        f = _level(fields, n - l + t)
        w = n - l + t
        a_row = f.a[t - 1, :w]
        tot = a_row + f.b[t - 1, :w]
        cols.append(BranchCol(up=(a_row / tot).tolist(),
                              flat=(1.0 - a_row / tot).tolist(),
                              seg=("x", t - l - 1)))
        if t == l:
            interface_after = len(cols) - 1
    for t in range(1, n - l + 2):
        f = _level(fields, n - t + 1)
        w = n - t + 1
        if t == n - l + 1:
            out = None if trimmed else [1.0] * w
            cols.append(MergeCol(out=out, up_in=[1.0] * w, flat_in=[1.0] * w,
                                 seg=("x", t - 1), sentinel_out=not trimmed))
        else:
            out = (f.a[l, :w] + f.b[l, :w]).tolist()
            cols.append(MergeCol(out=out, up_in=[1.0] * w, flat_in=[1.0] * w,
                                 seg=("x", t - 1)))
    if not trimmed:
        for t in range(1, n - l + 1):
            w = l + t - 1
            cols.append(BranchCol(up=[1.0] * w, flat=[1.0] * w,
                                  frozen_connector=True, sentinel=True))
    cg = build_chain(caps, cols, interface_after=interface_after)
    cg.p, cg.m = p, m
    return cg


def build_hswap(fields, l: int, trimmed: bool = False) -> ChainGraph:
    """The horizontal swap graph at observation row l (colors flipped).

    Branch columns carry the raw a-weights on their up edges (flat weight
    1); merge columns carry reciprocal b-weights on both the up-in and out
    edges of each pass vertex.  The first frozen block uses the j = 0
    extension of the b-grid one level down.
    """
    n = fields[0].level
    if not 1 <= l <= n + 1:
        raise ValueError(f"observation row {l} outside 1..{n + 1}")
    p, m = n - l + 1, l
    cols: list = []
    interface_after = None
    if l == n + 1:
        if trimmed:
            raise ValueError("no trimmed form at l = n + 1")
        caps = [1.0] * n
        for i in range(1, n):
            f = _level(fields, n - i + 1)
            b0 = b_column_zero(f.a, f.b)
            inv = (1.0 / b0).tolist()
            cols.append(MergeCol(out=inv, up_in=inv, flat_in=[1.0] * (n - i),
                                 frozen_out=True))
        cols.append(DROP)
        cols.append(FRESH)
        for t in range(2, n + 1):
            w = t - 1
            cols.append(BranchCol(up=[1.0] * w, flat=[1.0] * w,
                                  frozen_connector=True, sentinel=True))
        return build_chain(caps, cols, flip_colors=True)

    caps = None if trimmed else [1.0] * n
    if not trimmed:
        for i in range(1, l):
            f = _level(fields, n - i + 1)
            b0 = b_column_zero(f.a, f.b)
            inv = (1.0 / b0).tolist()
            cols.append(MergeCol(out=inv, up_in=inv, flat_in=[1.0] * (n - i),
                                 frozen_out=True))
    for t in range(1, l + 1):
        f = _level(fields, n - l + t)
        w = n - l + t
        a_col = f.a[:w, t - 1]
        cols.append(BranchCol(up=a_col.tolist(), flat=[1.0] * w,
                              seg=("x", t - l - 1)))
        if t == l:
            interface_after = len(cols) - 1
    for t in range(1, n - l + 2):
        f = _level(fields, n - t + 1)
        w = n - t + 1
        inv = (1.0 / f.b[:w, l - 1]).tolist()
        if t == n - l + 1 and trimmed:
            cols.append(MergeCol(out=None, up_in=inv, flat_in=[1.0] * w,
                                 seg=("x", t - 1)))
        else:
            sent = (t == n - l + 1)
            cols.append(MergeCol(out=inv, up_in=inv, flat_in=[1.0] * w,
                                 seg=("x", t - 1), sentinel_out=sent))
    if not trimmed:
        for t in range(1, n - l + 1):
            w = l + t - 1
            cols.append(BranchCol(up=[1.0] * w, flat=[1.0] * w,
                                  frozen_connector=True, sentinel=True))
    cg = build_chain(caps, cols, flip_colors=True, interface_after=interface_after)
    cg.p, cg.m = p, m
    return cg


def dimer_to_paths(cg: ChainGraph, pairs) -> PathTuple:
    """The path tuple of a swap-graph matching via the four edge-type rules.

    Branch up edges map to left-half horizontal segments, branch flat edges
    to down-right segments, merge out edges to right-half horizontal
    segments, and merge up-in edges to downward segments; connector edges
    carry no segment.  Segments assemble into p = n - l + 1 paths.
    """
    segments = {}
    for w, b in pairs:
        tag = cg.tags.get(frozenset((w, b)))
        if tag is not None:
            if tag[0] in segments:
                raise ValueError("conflicting segments (invalid matching)")
            segments[tag[0]] = tag[1]
    paths = []
    for j in range(1, cg.p + 1):
        v = (-cg.m, -j)
        path = [v]
        while v in segments:
            v = segments.pop(v)
            path.append(v)
        paths.append(tuple(path))
    if segments:
        raise ValueError("unconsumed path segments (invalid matching)")
    return PathTuple(cg.p, cg.m, tuple(paths))


def bar_slice(cg: ChainGraph, pairs) -> frozenset[int]:
    """Labels of interface pass vertices matched into the left half."""
    if cg.interface is None:
        raise ValueError("chain graph has no interface layer")
    partner = {}
    for w, b in pairs:
        partner[w] = b
        partner[b] = w
    out = set()
    for k, v in enumerate(cg.interface, start=1):
        tag = cg.tags.get(frozenset((v, partner[v])))
        if tag is not None and tag[0][0] < 0:
            out.add(k)
    return frozenset(out)
