"""The diamond graph coordinate system, matchings, and their observables.

Coordinates (all 1-based): white vertices w(l, k) sit in columns l = 1..n
(left to right) with labels k = 1..n+1 (top to bottom); black vertices
bk(i, j) sit in columns i = 1..n+1 with rows j = 1..n.  The edge set is

    bk(i, j) -- w(i, j)      weight a_{i,j}   (up-right from black; "NW" edge)
    bk(i, j) -- w(i, j+1)    weight b_{i,j}   (down-right from black; "SW")
    w(l, k) -- bk(l+1, k)    weight 1, k <= n  (down-right from white; "NE")
    w(l, k) -- bk(l+1, k-1)  weight 1, k >= 2  (up-right from white; "SE")

A matching is stored as one direction code per white vertex: the direction
from w(l, k) toward its matched black vertex, DL/UL/DR/UR.  DL selects the
NW a-edge, UL the SW b-edge, DR the NE edge, UR the SE edge.

The planar embedding used for sliding and rendering places bk(i, j) at
(2i - n - 1, n + 1 - 2j) and w(l, m) at (2l - n, n + 2 - 2m).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .weights import WeightField

NONE, DL, UL, DR, UR = 0, 1, 2, 3, 4
_DIR_CHARS = {DL: "L", UL: "U", UR: "R", DR: "D"}
_CHAR_DIRS = {v: k for k, v in _DIR_CHARS.items()}


class InvalidMatchingError(ValueError):
    pass


@dataclass
class Matching:
    """A perfect matching of the size-n diamond as a dense direction grid."""
    n: int
    dir: np.ndarray  # (n, n+1) int8, dir[l-1, k-1]

    def __post_init__(self):
        self.dir = np.asarray(self.dir, dtype=np.int8)
        if self.dir.shape != (self.n, self.n + 1):
            raise InvalidMatchingError(
                f"direction grid must be {self.n}x{self.n + 1}")

    def key(self) -> bytes:
        """Hashable identity for counting matchings."""
        return self.dir.tobytes()

    # -- serialization --------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"aztec n={self.n}"]
        for row in self.dir:
            lines.append("".join(_DIR_CHARS[int(d)] for d in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Matching":
        lines = [ln for ln in text.strip().splitlines() if ln]
        head = lines[0].strip()
        if not head.startswith("aztec n="):
            raise InvalidMatchingError("missing 'aztec n=<n>' header")
        n = int(head.split("=", 1)[1])
        if len(lines) != n + 1:
            raise InvalidMatchingError(f"expected {n} grid rows")
        grid = np.zeros((n, n + 1), dtype=np.int8)
        for l, ln in enumerate(lines[1:]):
            if len(ln) != n + 1:
                raise InvalidMatchingError(f"row {l + 1} must have {n + 1} characters")
            for k, ch in enumerate(ln):
                if ch not in _CHAR_DIRS:
                    raise InvalidMatchingError(f"unknown direction character {ch!r}")
                grid[l, k] = _CHAR_DIRS[ch]
        return cls(n, grid)

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n,
            "dir": ["".join(_DIR_CHARS[int(d)] for d in row) for row in self.dir],
        })

    @classmethod
    def from_json(cls, text: str) -> "Matching":
        d = json.loads(text)
        n = int(d["n"])
        return cls.from_text("aztec n=%d\n%s" % (n, "\n".join(d["dir"])))

    # -- edges ---------------------------------------------------------------

    def matched_black(self, l: int, k: int) -> tuple[int, int]:
        """The black vertex (i, j) matched to white (l, k)."""
        d = int(self.dir[l - 1, k - 1])
        if d == DL:
            return l, k
        if d == UL:
            return l, k - 1
        if d == DR:
            return l + 1, k
        if d == UR:
            return l + 1, k - 1
        raise InvalidMatchingError(f"white ({l},{k}) is unmatched")


def black_coverage(dir_grid: np.ndarray) -> np.ndarray:
    """Count of matched edges at each black vertex; (..., n+1, n) for (..., n, n+1) input.

    Works on batched partial grids; a perfect matching has all counts 1.
    """
    n = dir_grid.shape[-2]
    cov = np.zeros(dir_grid.shape[:-2] + (n + 1, n), dtype=np.int16)
    cov[..., :n, :] += (dir_grid[..., :, :n] == DL)
    cov[..., :n, :] += (dir_grid[..., :, 1:] == UL)
    cov[..., 1:, :] += (dir_grid[..., :, :n] == DR)
    cov[..., 1:, :] += (dir_grid[..., :, 1:] == UR)
    return cov


def validate(m: Matching) -> bool:
    """True iff the grid encodes a perfect matching of the size-n diamond."""
    d = m.dir
    n = m.n
    if d.shape != (n, n + 1):
        return False
    if not np.all((d >= DL) & (d <= UR)):
        return False
    # boundary feasibility: top row has no upward edges, bottom no downward
    if np.any((d[:, 0] == UL) | (d[:, 0] == UR)):
        return False
    if np.any((d[:, n] == DL) | (d[:, n] == DR)):
        return False
    return bool(np.all(black_coverage(d) == 1))


def matching_weight(m: Matching, w: WeightField) -> float:
    """log of the product of edge weights of the matching.

    Only a-edges (DL) and b-edges (UL) contribute; the white-left edges
    carry weight 1.
    """
    if w.level != m.n:
        raise InvalidMatchingError("weight field level does not match size")
    if not validate(m):
        raise InvalidMatchingError("not a perfect matching")
    d = m.dir
    n = m.n
    total = 0.0
    a_mask = d[:, :n] == DL          # white (l,k) with k<=n uses a_{l,k}
    total += float(np.sum(np.log(w.a), where=a_mask))
    b_mask = d[:, 1:] == UL          # white (l,k) with k>=2 uses b_{l,k-1}
    total += float(np.sum(np.log(w.b), where=b_mask))
    return total


def log_weights_batch(dir_grids: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched matching_weight over (..., n, n+1) grids and (n, n) weights."""
    n = dir_grids.shape[-2]
    la, lb = np.log(a), np.log(b)
    wa = np.sum(np.where(dir_grids[..., :, :n] == DL, la, 0.0), axis=(-2, -1))
    wb = np.sum(np.where(dir_grids[..., :, 1:] == UL, lb, 0.0), axis=(-2, -1))
    return wa + wb


def turning_points(m: Matching) -> tuple[int, int, int, int]:
    """(north, east, south, west) boundary statistics.

    north: a-edges at the top white row; east: NE edges into the rightmost
    black column; south: b-edges at the bottom white row; west: a-edges
    covering the leftmost black column.
    """
    if not validate(m):
        raise InvalidMatchingError("not a perfect matching")
    d = m.dir
    n = m.n
    north = int(np.sum(d[:, 0] == DL))
    south = int(np.sum(d[:, n] == UL))
    west = int(np.sum(d[0, :n] == DL))
    east = int(np.sum(d[n - 1, :] == DR))
    return north, east, south, west


def turning_points_batch(dir_grids: np.ndarray) -> np.ndarray:
    """(..., 4) array of (north, east, south, west) for batched grids."""
    n = dir_grids.shape[-2]
    north = np.sum(dir_grids[..., :, 0] == DL, axis=-1)
    south = np.sum(dir_grids[..., :, n] == UL, axis=-1)
    west = np.sum(dir_grids[..., 0, :n] == DL, axis=-1)
    east = np.sum(dir_grids[..., n - 1, :] == DR, axis=-1)
    return np.stack([north, east, south, west], axis=-1)


def _column_slice(column: np.ndarray) -> frozenset[int]:
    # labels k (1-based) in one white column matched to a black on their left
    return frozenset(int(k) + 1 for k in np.nonzero((column == DL) | (column == UL))[0])


def vertical_slice(m: Matching, l: int) -> frozenset[int]:
    """Labels of white vertices in column l matched to a black on their left."""
    if not 1 <= l <= m.n:
        raise ValueError(f"column index {l} outside 1..{m.n}")
    if not validate(m):
        raise InvalidMatchingError("not a perfect matching")
    out = _column_slice(m.dir[l - 1])
    assert len(out) == m.n - l + 1
    return out


def horizontal_slice(m: Matching, l: int) -> frozenset[int]:
    """Labels of black vertices in row l matched to a white vertex above them."""
    if not 1 <= l <= m.n:
        raise ValueError(f"row index {l} outside 1..{m.n}")
    if not validate(m):
        raise InvalidMatchingError("not a perfect matching")
    d = m.dir
    n = m.n
    labels = set(int(i) + 1 for i in np.nonzero(d[:, l - 1] == DL)[0])
    labels.update(int(i) + 2 for i in np.nonzero(d[:, l - 1] == DR)[0])
    out = frozenset(labels)
    assert len(out) == n - l + 1
    return out


# -- planar embedding -----------------------------------------------------------

def black_xy(n: int, i: int, j: int) -> tuple[int, int]:
    return 2 * i - n - 1, n + 1 - 2 * j


def white_xy(n: int, l: int, k: int) -> tuple[int, int]:
    return 2 * l - n, n + 2 - 2 * k
