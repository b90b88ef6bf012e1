"""Weight grids and the shuffle recursions that connect diamond sizes.

A size-n diamond carries two positive n x n grids a, b (stored with 0-based
numpy indices, a[i-1, j-1] = a_{i,j}).  Passing from size n to n-1 updates

    a'_{i,j} = a_{i,j} / (a_{i,j} + b_{i,j}) * (a_{i+1,j} + b_{i+1,j})
    b'_{i,j} = b_{i,j+1} / (a_{i,j+1} + b_{i,j+1}) * (a_{i+1,j+1} + b_{i+1,j+1})

and the upward recursion inverts it:

    a^{i,j} = a_{i,j} / (a_{i,j} + b_{i,j-1}) * (a_{i-1,j} + b_{i-1,j-1})
    b^{i,j} = b_{i,j-1} / (a_{i,j} + b_{i,j-1}) * (a_{i-1,j} + b_{i-1,j-1}).

For independent Gamma entries with admissible parameters both maps send
independent fields to independent fields with shifted marginals; that
invariance is what makes the whole construction exactly solvable, and
the statistical test suite checks it empirically.

All operations also come in replica-batched form: arrays may carry leading
axes (R, ...) and the recursions are pure elementwise arithmetic, so a batch
of fields cascades in a few vectorized passes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .params import ParamSet
from .randvars import gamma_field
from .rng import RngStream


@dataclass
class WeightField:
    """Positive weight grids of one diamond size; immutable by convention."""
    level: int
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        n = self.level
        if self.a.shape[-2:] != (n, n) or self.b.shape[-2:] != (n, n):
            raise ValueError(f"weight grids must be {n}x{n} in the trailing axes")
        if not (np.all(self.a > 0) and np.all(self.b > 0)):
            raise ValueError("weight grids must be strictly positive")
        if not (np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.b))):
            raise ValueError("weight grids must be finite")

    @classmethod
    def constant(cls, n: int, a: float, b: float) -> "WeightField":
        return cls(n, np.full((n, n), float(a)), np.full((n, n), float(b)))

    def to_json(self) -> str:
        return json.dumps({
            "level": self.level,
            "a": self.a.reshape(-1).tolist(),
            "b": self.b.reshape(-1).tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "WeightField":
        d = json.loads(text)
        n = int(d["level"])
        a = np.array(d["a"], dtype=float).reshape(n, n)
        b = np.array(d["b"], dtype=float).reshape(n, n)
        return cls(n, a, b)


def sample_weight_field(params: ParamSet, n: int, rng: RngStream,
                        replicas: int | None = None) -> WeightField:
    """Independent Gamma weights for a size-n diamond.

    a_{i,j} ~ Gamma(psi_j + theta_i, 1) and b_{i,j} ~ Gamma(phi_{j-n} - theta_i, 1).
    With ``replicas`` set, the grids carry a leading replica axis.
    """
    params.validate(n)
    prefix = () if replicas is None else (replicas,)
    a = gamma_field(rng, params.a_shape_grid(n), size_prefix=prefix)
    b = gamma_field(rng, params.b_shape_grid(n), size_prefix=prefix)
    return WeightField(n, a, b)


def downshuffle_arrays(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One downward step on raw (..., I, J) grids, returning (..., I-1, J-1)."""
    if a.shape[-1] < 2 or a.shape[-2] < 2:
        return a[..., :0, :0], b[..., :0, :0]
    tot = a + b
    frac_a = a / tot
    frac_b = b / tot
    a_new = frac_a[..., :-1, :-1] * tot[..., 1:, :-1]
    b_new = frac_b[..., :-1, 1:] * tot[..., 1:, 1:]
    return a_new, b_new


def downshuffle(w: WeightField) -> WeightField:
    """The size-(n-1) field determined by a size-n field."""
    if w.level < 1:
        raise ValueError("cannot downshuffle below level 0")
    a_new, b_new = downshuffle_arrays(w.a, w.b)
    return WeightField(w.level - 1, a_new, b_new)


def upshuffle_arrays(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One upward step on an extended window.

    Inputs cover i in 1..I (axis -2) and j in 0..J (axis -1, first column is
    j = 0).  Outputs cover the shrunken interior i in 2..I, j in 1..J, so the
    returned grids lose one row and one column.
    """
    if a.shape[-2] < 2 or a.shape[-1] < 2:
        raise ValueError("upshuffle window must span at least 2 rows and 2 columns")
    a_cur = a[..., 1:, 1:]       # a_{i,j},   i >= 2, j >= 1
    b_left = b[..., 1:, :-1]     # b_{i,j-1}
    a_up = a[..., :-1, 1:]       # a_{i-1,j}
    b_upleft = b[..., :-1, :-1]  # b_{i-1,j-1}
    denom = a_cur + b_left
    carry = a_up + b_upleft
    return a_cur / denom * carry, b_left / denom * carry


def cascade(w: WeightField) -> list[WeightField]:
    """Fields at levels n, n-1, ..., 1 obtained by repeated downshuffle."""
    fields = [w]
    cur = w
    while cur.level > 1:
        cur = downshuffle(cur)
        fields.append(cur)
    return fields


def iter_levels_ascending(w: WeightField, block: int | None = None):
    """Yield (a, b) raw grids at levels 1, 2, ..., n without storing them all.

    Keeps checkpoint levels every ``block`` steps (default ~sqrt(n)) and
    regenerates the intermediate levels one block at a time, so memory stays
    O(n^2.5) instead of the O(n^3) of a full cascade.  Used by the large-n
    sampler; small n just materializes everything.
    """
    n = w.level
    if block is None:
        block = max(1, int(np.sqrt(n)))
    checkpoints = {n: (w.a, w.b)}
    a, b = w.a, w.b
    for lev in range(n - 1, 0, -1):
        a, b = downshuffle_arrays(a, b)
        if lev % block == 0 or lev == 1:
            checkpoints[lev] = (a, b)
    levels_sorted = sorted(checkpoints)
    for idx, lo in enumerate(levels_sorted):
        hi = levels_sorted[idx + 1] if idx + 1 < len(levels_sorted) else None
        yield lo, checkpoints[lo]
        if hi is None:
            break
        # regenerate the open block (lo, hi) descending, then emit ascending
        seg = {}
        a, b = checkpoints[hi]
        for lev in range(hi - 1, lo, -1):
            a, b = downshuffle_arrays(a, b)
            seg[lev] = (a, b)
        for lev in range(lo + 1, hi):
            yield lev, seg.pop(lev)


def partition_product(fields: list[WeightField]) -> float:
    """log Z of the diamond from its cascade.

    log Z = sum over levels k and columns j of log(a_{1,j} + b_{1,j}) at
    level k; equals the exhaustively enumerated log partition function.
    """
    if not fields:
        raise ValueError("cascade must be nonempty")
    total = 0.0
    for f in fields:
        total += float(np.sum(np.log(f.a[..., 0, :] + f.b[..., 0, :])))
    return total


def partition_product_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """log Z per replica for batched (R, n, n) weight grids."""
    out = np.sum(np.log(a[..., 0, :] + b[..., 0, :]), axis=-1)
    while a.shape[-1] > 1:
        a, b = downshuffle_arrays(a, b)
        out += np.sum(np.log(a[..., 0, :] + b[..., 0, :]), axis=-1)
    return out


def downshuffle_arrays_log(la: np.ndarray, lb: np.ndarray
                           ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Log-space downward step; also returns log(a + b) of the input level.

    Needed when shapes are far below the ParamSet floor (deep-quench
    temperature sweeps): linear-space weights then underflow to zero.
    """
    ltot = np.logaddexp(la, lb)
    if la.shape[-1] < 2 or la.shape[-2] < 2:
        return la[..., :0, :0], lb[..., :0, :0], ltot
    la_new = la[..., :-1, :-1] - ltot[..., :-1, :-1] + ltot[..., 1:, :-1]
    lb_new = lb[..., :-1, 1:] - ltot[..., :-1, 1:] + ltot[..., 1:, 1:]
    return la_new, lb_new, ltot


def partition_product_batch_log(la: np.ndarray, lb: np.ndarray) -> np.ndarray:
    """log Z per replica from batched log-weight grids, stable at any shape."""
    out = np.zeros(la.shape[:-2])
    while True:
        la2, lb2, ltot = downshuffle_arrays_log(la, lb)
        out = out + np.sum(ltot[..., 0, :], axis=-1)
        if la2.shape[-1] == 0:
            return out
        la, lb = la2, lb2


def b_column_zero(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """The j = 0 column of b one level down from grids at level k.

    b_{i,0}^{[k-1]} = b_{i,1}/(a_{i,1}+b_{i,1}) * (a_{i+1,1}+b_{i+1,1}) for
    i in 1..k-1; needed by the horizontal swap graphs, whose frozen block
    reaches one column left of the standard window.
    """
    tot = a[..., :, 0] + b[..., :, 0]
    return b[..., :-1, 0] / tot[..., :-1] * tot[..., 1:]


# --- column swap weight maps ---------------------------------------------------

def vswap_update(beta, gamma) -> tuple[np.ndarray, np.ndarray]:
    """Commute a branch/merge column pair, m weights in, m-1 out.

    gamma_hat_j = beta_j gamma_j + (1 - beta_{j+1}) gamma_{j+1}
    beta_hat_j  = beta_j gamma_j / gamma_hat_j

    For independent beta_j ~ Beta(x_j, y_j), gamma_j ~ Gamma(x_j + y_j, 1)
    the outputs are independent Beta(x_j, y_{j+1}), Gamma(x_j + y_{j+1}, 1).
    """
    beta = np.asarray(beta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if beta.shape != gamma.shape:
        raise ValueError("beta and gamma must have equal length")
    if beta.size and not (np.all(beta > 0) and np.all(beta < 1)):
        raise ValueError("beta entries must lie strictly inside (0,1)")
    if beta.size and not np.all(gamma > 0):
        raise ValueError("gamma entries must be positive")
    num = beta[:-1] * gamma[:-1]
    gamma_hat = num + (1.0 - beta[1:]) * gamma[1:]
    beta_hat = num / gamma_hat
    return gamma_hat, beta_hat


def hswap_update(a_col, b_col) -> tuple[np.ndarray, np.ndarray]:
    """Commute one adjacent column pair of a/b weights, m rows in, m-1 out.

    Row-direction restriction of the downward recursion:
    a_hat_i = a_i/(a_i+b_i) * (a_{i+1}+b_{i+1}), b_hat_i likewise with b_i.
    """
    a_col = np.asarray(a_col, dtype=float)
    b_col = np.asarray(b_col, dtype=float)
    if a_col.shape != b_col.shape:
        raise ValueError("column vectors must have equal length")
    if a_col.size and not (np.all(a_col > 0) and np.all(b_col > 0)):
        raise ValueError("column weights must be positive")
    tot = a_col + b_col
    carry = tot[1:]
    return a_col[:-1] / tot[:-1] * carry, b_col[:-1] / tot[:-1] * carry
