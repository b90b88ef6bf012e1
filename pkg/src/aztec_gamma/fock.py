"""Deterministic face weights and their large-parameter limit.

The dimer measure on a diamond is determined by its face weights: for an
even face (black vertices left/right) carrying edge weights a (up-left),
b (down-left) and 1, 1, the face weight is a/b; odd faces (white vertices
left/right) give b_{i+1,j} / a_{i+1,j+1}.

The rail-yard family parametrized by track labels alpha < gamma < beta <
delta assigns each edge the absolute difference of its two track labels.
With alpha_j = -psi_j, gamma_i = theta_i, beta_j = phi_{j-n} and delta_i =
delta, its face weights converge as delta -> infinity to the deterministic
limit of the Gamma weights (a = psi_j + theta_i, b = phi_{j-n} - theta_i),
with first-order error proportional to 1/delta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ParamSet


@dataclass
class FaceWeightGrid:
    """Face weights of a size-n diamond: even (n x n) and odd ((n-1) x (n-1))."""
    even: np.ndarray
    odd: np.ndarray

    def __post_init__(self):
        self.even = np.asarray(self.even, dtype=float)
        self.odd = np.asarray(self.odd, dtype=float)
        if np.any(self.even <= 0) or (self.odd.size and np.any(self.odd <= 0)):
            raise ValueError("face weights must be positive")


def _grids(params: ParamSet, n: int):
    psi = np.array([params.psi_at(j) for j in range(1, n + 1)])
    phi = np.array([params.phi_at(j - n) for j in range(1, n + 1)])
    theta = np.array([params.theta_at(i) for i in range(1, n + 1)])
    return psi, phi, theta


def limit_face_weights(params: ParamSet, n: int) -> FaceWeightGrid:
    """Face weights of the deterministic limit a = psi_j + theta_i, b = phi_{j-n} - theta_i."""
    params.validate(n)
    psi, phi, theta = _grids(params, n)
    even = (theta[:, None] + psi[None, :]) / (phi[None, :] - theta[:, None])
    # odd face (i,j): b_{i+1,j} / a_{i+1,j+1} for i, j in 1..n-1
    odd = (phi[None, :-1] - theta[1:, None]) / (psi[None, 1:] + theta[1:, None])
    return FaceWeightGrid(even, odd)


def fock_face_weights(params: ParamSet, n: int, delta: float) -> FaceWeightGrid:
    """Rail-yard face weights at finite delta.

    Track labels: alpha_j = -psi_j, gamma_i = theta_i, beta_j = phi_{j-n},
    delta_i = delta; requires the strict ordering alpha < gamma < beta < delta,
    i.e. admissibility plus delta > max phi.
    """
    params.validate(n)
    psi, phi, theta = _grids(params, n)
    if not delta > phi.max():
        raise ValueError("delta must exceed every phi_{j-n} (track ordering)")
    if not (np.all(-psi[None, :] < theta[:, None]) and np.all(theta[:, None] < phi[None, :])):
        raise ValueError("track ordering alpha < gamma < beta violated")
    alpha = -psi
    gamma = theta
    beta = phi
    even = ((gamma[:, None] - alpha[None, :]) * (delta - beta[None, :])
            / ((delta - alpha[None, :]) * (beta[None, :] - gamma[:, None])))
    odd = ((beta[None, :-1] - gamma[1:, None]) * (delta - alpha[None, 1:])
           / ((delta - beta[None, :-1]) * (gamma[1:, None] - alpha[None, 1:])))
    return FaceWeightGrid(even, odd)
