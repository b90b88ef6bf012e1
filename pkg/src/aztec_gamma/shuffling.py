"""The growth step between diamond sizes and samplers built on it.

One step takes a perfect matching of size k to one of size k+1 in three
stages:

1. destruction: wherever an up-right white edge (UR) at w(l, m) faces an
   a-edge (DL) at w(l+1, m) across an odd face, or a down-right white edge
   (DR) faces a b-edge (UL), the pair would swap places under sliding and
   is deleted instead;
2. slide: surviving edges move one unit along their direction.  On the
   direction grid: DL keeps (l, m), UL moves to (l, m+1), DR to (l+1, m),
   UR to (l+1, m+1);
3. creation: the uncovered vertices decompose uniquely into even faces
   (consecutive pairs of uncovered whites within each column); each such
   face is filled with the a-edge/UR pair with probability a/(a+b)
   (weights of the larger diamond at that face), else the b-edge/DR pair.

Iterating from the empty matching with weights generated by the downward
recursion samples the size-n dimer measure exactly.  All stages are
elementwise on the direction grid, so everything here is replica-batched:
grids may carry a leading replica axis, and a fixed environment broadcasts
across it.
"""

from __future__ import annotations

import numpy as np

from .matching import DL, DR, UL, UR, InvalidMatchingError, Matching, black_coverage, validate
from .params import ParamSet
from .rng import RngStream
from .weights import (WeightField, cascade, downshuffle_arrays, iter_levels_ascending,
                      sample_weight_field)


def destroy_and_slide(dir_grids: np.ndarray) -> np.ndarray:
    """Stages 1-2 on (..., k, k+1) grids, returning partial (..., k+1, k+2) grids."""
    k = dir_grids.shape[-2]
    d = dir_grids.copy()
    if k >= 2:
        left = d[..., : k - 1, 1:k]
        right = d[..., 1:k, 1:k]
        pair1 = (left == UR) & (right == DL)
        pair2 = (left == DR) & (right == UL)
        kill = pair1 | pair2
        left[kill] = 0
        right[kill] = 0
    out = np.zeros(d.shape[:-2] + (k + 1, k + 2), dtype=np.int8)
    out[..., :k, : k + 1][d == DL] = DL
    out[..., :k, 1:][d == UL] = UL
    out[..., 1:, : k + 1][d == DR] = DR
    out[..., 1:, 1:][d == UR] = UR
    return out


def empty_faces(partial: np.ndarray) -> np.ndarray:
    """Boolean (..., K, K) mask of faces to fill in the creation stage.

    The uncovered vertices of a valid slid configuration decompose uniquely
    into even faces, and the decomposition is forced by the whites alone:
    within each white column the uncovered labels pair up consecutively, so
    a face starts at every uncovered white with an even number of uncovered
    whites above it.  (Testing all four corners is not enough: spurious
    fully-uncovered faces can overlap the true ones.)
    """
    K = partial.shape[-2]
    cov = black_coverage(partial)
    if cov.max() > 1:
        raise InvalidMatchingError("vertex covered twice after slide")
    wfree = partial == 0
    above = np.cumsum(wfree, axis=-1) - wfree
    return wfree[..., :, :K] & (above[..., :, :K] % 2 == 0)


def fill_faces(partial: np.ndarray, faces: np.ndarray, choose_a: np.ndarray) -> np.ndarray:
    """Stage 3: write the chosen edge pair into each marked face (in place)."""
    K = partial.shape[-2]
    take_a = faces & choose_a
    take_b = faces & ~choose_a
    view_lo = partial[..., :, :K]   # white (i, j) slot of face (i, j)
    view_hi = partial[..., :, 1:]   # white (i, j+1) slot
    view_lo[take_a] = DL
    view_hi[take_a] = UR
    view_lo[take_b] = DR
    view_hi[take_b] = UL
    return partial


def shuffle_step(m: Matching, w_next: WeightField, rng: RngStream) -> Matching:
    """Grow a size-k matching to size k+1 using the size-(k+1) weights."""
    if w_next.level != m.n + 1:
        raise ValueError("w_next must be the weights of the next size up")
    if m.n > 0 and not validate(m):
        raise InvalidMatchingError("input matching invalid")
    partial = destroy_and_slide(m.dir)
    faces = empty_faces(partial)
    u = rng.uniform(faces.shape)
    choose_a = u < w_next.a / (w_next.a + w_next.b)
    out = Matching(m.n + 1, fill_faces(partial, faces, choose_a))
    if not validate(out):
        raise InvalidMatchingError("shuffle step produced an invalid matching")
    return out


def empty_matching() -> Matching:
    return Matching(0, np.zeros((0, 1), dtype=np.int8))


def shuffle_transition_distribution(m: Matching, w_next: WeightField
                                    ) -> list[tuple[Matching, float]]:
    """Exact transition law to size k+1: one outcome per creation choice combo.

    State-space guard: only sizes k <= 3 are enumerated (2^10 successors at
    most); probabilities sum to 1 by construction.
    """
    if m.n > 3:
        raise ValueError("transition enumeration limited to sizes k <= 3")
    if w_next.level != m.n + 1:
        raise ValueError("w_next must be the weights of the next size up")
    partial = destroy_and_slide(m.dir)
    faces = empty_faces(partial)
    coords = np.argwhere(faces)
    pa = w_next.a / (w_next.a + w_next.b)
    out = []
    for bits in range(1 << len(coords)):
        choose = np.zeros_like(faces)
        prob = 1.0
        for t, (i, j) in enumerate(coords):
            if bits >> t & 1:
                choose[i, j] = True
                prob *= pa[i, j]
            else:
                prob *= 1.0 - pa[i, j]
        filled = fill_faces(partial.copy(), faces, choose)
        out.append((Matching(m.n + 1, filled), float(prob)))
    return out


def sample_trajectory(params: ParamSet, n: int, rng: RngStream
                      ) -> tuple[list[WeightField], list[Matching]]:
    """A coupled matching sequence M_1..M_n plus the weight cascade used.

    The cascade is returned at levels n..1 (the order it is generated in);
    the matchings are in growth order 1..n.
    """
    field = sample_weight_field(params, n, rng)
    fields = cascade(field)
    dir_cur = np.zeros((0, 1), dtype=np.int8)
    matchings = []
    for lev in range(1, n + 1):
        f = fields[n - lev]
        partial = destroy_and_slide(dir_cur)
        faces = empty_faces(partial)
        choose_a = rng.uniform(faces.shape) < f.a / (f.a + f.b)
        dir_cur = fill_faces(partial, faces, choose_a)
        matchings.append(Matching(lev, dir_cur.copy()))
    return fields, matchings


def sample_matchings_batch(a: np.ndarray, b: np.ndarray, rng: RngStream,
                           replicas: int | None = None) -> np.ndarray:
    """Final (R, n, n+1) direction grids for batched or broadcast environments.

    ``a``/``b`` are level-n grids, either (R, n, n) for per-replica
    environments or (n, n) shared by all replicas (set ``replicas``).
    """
    if a.ndim == 2:
        if replicas is None:
            raise ValueError("replicas required for a shared environment")
        lead = (replicas,)
    else:
        lead = a.shape[:-2]
    n = a.shape[-1]
    levels = [(a, b)]
    while levels[-1][0].shape[-1] > 1:
        levels.append(downshuffle_arrays(*levels[-1]))
    dir_cur = np.zeros(lead + (0, 1), dtype=np.int8)
    for lev in range(1, n + 1):
        la, lb = levels[n - lev]
        partial = destroy_and_slide(dir_cur)
        faces = empty_faces(partial)
        pa = la / (la + lb)
        u = rng.uniform(faces.shape)
        choose_a = u < np.broadcast_to(pa, faces.shape)
        dir_cur = fill_faces(partial, faces, choose_a)
    return dir_cur


def sample_matching_for_field(field: WeightField, rng: RngStream) -> Matching:
    """One sample from a fixed environment, memory-lean at large sizes.

    Levels are regenerated in checkpointed blocks, so two calls with the
    same field but different streams give two quenched samples (the pair
    needed for overlap pictures).
    """
    dir_cur = np.zeros((0, 1), dtype=np.int8)
    for lev, (la, lb) in iter_levels_ascending(field):
        partial = destroy_and_slide(dir_cur)
        faces = empty_faces(partial)
        choose_a = rng.uniform(faces.shape) < la / (la + lb)
        dir_cur = fill_faces(partial, faces, choose_a)
        assert dir_cur.shape[0] == lev
    return Matching(field.level, dir_cur)


def sample_final_matching(params: ParamSet, n: int, rng: RngStream) -> Matching:
    """Fresh environment plus one sample (the annealed single-call path)."""
    return sample_matching_for_field(sample_weight_field(params, n, rng), rng)
