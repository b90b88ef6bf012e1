"""Admissible parameter sets for the Gamma weight family.

A parameter set holds four sequences: psi_j (j = 1, 2, ...), phi_j (j =
phi_min_index, ..., 0, indexed downward), theta_i and s_i (i = 1, 2, ...).
A size-n diamond draws its a-weights from Gamma(psi_j + theta_i, 1) and its
b-weights from Gamma(phi_{j-n} - theta_i, 1), so the windows must be wide
enough for every (i, j, level) combination a given run touches.

Admissibility requires s_i > 0 and all shapes psi_j + theta_i and
phi_j - theta_i positive; the samplers additionally enforce shapes >= 0.05
so that weight quotients a/(a+b) stay well-conditioned in plain double
arithmetic (no log-space in the shuffle inner loop).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

MIN_SHAPE = 0.05


class AdmissibilityError(ValueError):
    pass


@dataclass
class ParamSet:
    psi: list[float]              # psi_j for j = 1..len(psi)
    phi: list[float]              # phi_j for j = phi_min_index..phi_min_index+len(phi)-1
    theta: list[float]            # theta_i for i = 1..len(theta)
    s: list[float] = field(default_factory=list)   # s_i, defaults to all ones
    phi_min_index: int = 0

    def __post_init__(self):
        if not self.s:
            self.s = [1.0] * len(self.theta)
        if len(self.s) != len(self.theta):
            raise ValueError("s must have one entry per theta index")
        if self.phi_min_index + len(self.phi) - 1 != 0:
            raise ValueError("phi window must end at index 0")

    # -- indexed accessors (1-based psi/theta, phi indexed by its true j) --

    def psi_at(self, j: int) -> float:
        if not 1 <= j <= len(self.psi):
            raise AdmissibilityError(f"psi_{j} outside window 1..{len(self.psi)}")
        return self.psi[j - 1]

    def phi_at(self, j: int) -> float:
        k = j - self.phi_min_index
        if not 0 <= k < len(self.phi):
            raise AdmissibilityError(
                f"phi_{j} outside window {self.phi_min_index}..0")
        return self.phi[k]

    def theta_at(self, i: int) -> float:
        if not 1 <= i <= len(self.theta):
            raise AdmissibilityError(f"theta_{i} outside window 1..{len(self.theta)}")
        return self.theta[i - 1]

    def s_at(self, i: int) -> float:
        if not 1 <= i <= len(self.s):
            raise AdmissibilityError(f"s_{i} outside window 1..{len(self.s)}")
        return self.s[i - 1]

    # -- shape grids ---------------------------------------------------------

    def a_shape(self, i: int, j: int) -> float:
        return self.psi_at(j) + self.theta_at(i)

    def b_shape(self, i: int, j: int, level: int) -> float:
        return self.phi_at(j - level) - self.theta_at(i)

    def a_shape_grid(self, n: int) -> np.ndarray:
        """Shapes of a_{i,j} for i, j in 1..n as an (n, n) array [i-1, j-1]."""
        psi = np.array([self.psi_at(j) for j in range(1, n + 1)])
        theta = np.array([self.theta_at(i) for i in range(1, n + 1)])
        return theta[:, None] + psi[None, :]

    def b_shape_grid(self, n: int, level: int | None = None) -> np.ndarray:
        """Shapes of b_{i,j} at the given level (default n), (n, n) array."""
        level = n if level is None else level
        phi = np.array([self.phi_at(j - level) for j in range(1, n + 1)])
        theta = np.array([self.theta_at(i) for i in range(1, n + 1)])
        return phi[None, :] - theta[:, None]

    def validate(self, n: int) -> None:
        """Check admissibility (shapes >= MIN_SHAPE, s > 0) for a size-n diamond."""
        if n < 1:
            raise AdmissibilityError("diamond size must be >= 1")
        a = self.a_shape_grid(n)
        b = self.b_shape_grid(n)
        if np.any(np.array(self.s[:n]) <= 0):
            raise AdmissibilityError("scale parameters must be positive")
        if a.min() < MIN_SHAPE or b.min() < MIN_SHAPE:
            raise AdmissibilityError(
                f"shape parameters below {MIN_SHAPE}: "
                f"min a-shape {a.min():.4g}, min b-shape {b.min():.4g}")

    # -- constructors ----------------------------------------------------------

    @classmethod
    def biased(cls, alpha: float, beta: float, n: int, extra: int = 0) -> "ParamSet":
        """Homogeneous parameters psi = alpha, phi = beta, theta = 0.

        Windows cover a size-n diamond; ``extra`` widens them for shuffle
        horizons or level-0 fields that reach outside the standard index
        ranges.
        """
        width = n + extra
        ps = cls(
            psi=[float(alpha)] * width,
            phi=[float(beta)] * (width + 1),
            theta=[0.0] * width,
            phi_min_index=-width,
        )
        ps.validate(n)
        return ps

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({
            "psi": self.psi,
            "phi": self.phi,
            "theta": self.theta,
            "s": self.s,
            "phi_min_index": self.phi_min_index,
        })

    @classmethod
    def from_json(cls, text: str) -> "ParamSet":
        d = json.loads(text)
        return cls(
            psi=[float(v) for v in d["psi"]],
            phi=[float(v) for v in d["phi"]],
            theta=[float(v) for v in d["theta"]],
            s=[float(v) for v in d.get("s", [])],
            phi_min_index=int(d["phi_min_index"]),
        )
