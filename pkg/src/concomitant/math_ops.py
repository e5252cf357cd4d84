"""Closed-form kernels: soft-thresholding operators, Mahalanobis forms,
matrix norms, and the noise square-root updates (full eigen-based, per-block
scalar, and single-task rank-one)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import EigenFailure, FullNoise

# Relative cutoff below which eigenvalues of the residual Gram matrix are
# treated as round-off zeros (prevents sqrt of tiny negatives).
_EIG_CLAMP = 1e-12


def soft_threshold(x: float, tau: float) -> float:
    """Scalar shrinkage sign(x) * (|x| - tau)_+."""
    m = abs(x) - tau
    if m <= 0.0:
        return 0.0
    return m if x > 0 else -m


def block_soft_threshold(x: np.ndarray, tau: float) -> np.ndarray:
    """Shrink the Euclidean norm of x by tau, zeroing it below tau."""
    nrm = float(np.sqrt(x @ x))
    if nrm <= tau:
        return np.zeros_like(x)
    return (1.0 - tau / nrm) * x


def mahalanobis_sq(Z: np.ndarray, Sinv: np.ndarray) -> float:
    """Quadratic form Tr(Z' Sinv Z) for an SPD metric Sinv."""
    return float(np.sum(Z * (Sinv @ Z)))


def row_norms(M: np.ndarray) -> np.ndarray:
    return np.linalg.norm(M, axis=1)


def row_norm_2inf(M: np.ndarray) -> float:
    """Largest row norm (the dual norm of the row-wise group penalty)."""
    if M.shape[0] == 0:
        return 0.0
    return float(np.max(np.linalg.norm(M, axis=1)))


def l21_norm(M: np.ndarray) -> float:
    return float(np.sum(np.linalg.norm(M, axis=1)))


def spectral_norm(M: np.ndarray) -> float:
    """Largest singular value."""
    if M.ndim == 1:
        return float(np.linalg.norm(M))
    if not M.any():
        return 0.0
    return float(np.linalg.norm(M, ord=2))


def sigma_update_full(R: np.ndarray, q: int, floor: float) -> FullNoise:
    """Optimal full noise square root for a fixed residual.

    Eigendecomposes (R/sqrt(q)) (R/sqrt(q))' and floors each square-rooted
    eigenvalue at ``floor``, which minimizes the data-fit-plus-trace
    objective over all square roots >= floor * I.
    """
    if R.ndim == 1:
        R = R.reshape(-1, 1)
    Z = R / np.sqrt(q)
    G = Z @ Z.T
    try:
        evals, U = np.linalg.eigh(G)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"eigendecomposition of the residual Gram matrix failed: {exc}") from exc
    evals[evals < _EIG_CLAMP * max(float(evals[-1]), 1.0)] = 0.0
    mu = np.maximum(np.sqrt(evals), floor)
    inv = (U / mu) @ U.T
    return FullNoise(U, mu, inv, float(mu.sum()))


def sigma_update_block(
    R: np.ndarray,
    blocks: tuple[int, ...],
    floors: np.ndarray,
    q: int,
) -> np.ndarray:
    """Per-block noise scale: the floored residual root-mean-square."""
    if R.ndim == 1:
        R = R.reshape(-1, 1)
    sigmas = np.empty(len(blocks))
    off = 0
    for k, nk in enumerate(blocks):
        nrm = float(np.linalg.norm(R[off : off + nk]))
        sigmas[k] = max(float(floors[k]), nrm / np.sqrt(nk * q))
        off += nk
    return sigmas


@dataclass
class RankOneNoise:
    """Single-task noise square root floor*I + gamma * z z' with its
    Sherman-Morrison inverse and trace cached."""

    gamma: float
    z: np.ndarray
    sigma_min: float
    inv: np.ndarray
    trace: float

    @property
    def n(self) -> int:
        return len(self.z)

    def reconstruct(self) -> np.ndarray:
        S = self.sigma_min * np.eye(self.n)
        if self.gamma > 0:
            S += self.gamma * np.outer(self.z, self.z)
        return S

    def diagonal(self) -> np.ndarray:
        return self.sigma_min + self.gamma * self.z**2


def sigma_update_rank_one(z: np.ndarray, floor: float) -> RankOneNoise:
    """Single-task analogue of the full update, in closed rank-one form.

    gamma = (||z|| - floor)_+ / ||z||^2 (zero when z = 0), so the floored
    direction structure matches the eigen-based update exactly.
    """
    z = np.asarray(z, dtype=np.float64).ravel()
    n = len(z)
    ssq = float(z @ z)
    nrm = np.sqrt(ssq)
    if nrm <= floor:
        gamma = 0.0
        inv = np.eye(n) / floor
    else:
        gamma = (nrm - floor) / ssq
        inv = np.eye(n) / floor - (gamma / (floor**2 * (1.0 + gamma * ssq / floor))) * np.outer(z, z)
    return RankOneNoise(gamma, z.copy(), floor, inv, n * floor + gamma * ssq)
