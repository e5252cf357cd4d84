"""Shared data model: matrices with block structure, noise square-root
covariance representations, solver configuration and fit results.

All floating point data is float64; design matrices are stored column-major
because coordinate descent reads one column at a time.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_FLOOR_ALPHA = 3


class ShapeMismatch(ValueError):
    """Row/column counts of paired matrices do not agree."""


class NonFinite(ValueError):
    """A matrix entry is NaN or infinite."""


class ZeroBlock(ValueError):
    """A block of the observations is identically zero, so its default
    noise floor would be zero."""


class EigenFailure(RuntimeError):
    """The symmetric eigenvalue decomposition did not converge."""


class DegenerateProblem(ValueError):
    """The critical regularization level is zero (e.g. X'Y = 0)."""


class CalibrationFailure(RuntimeError):
    """The requested signal-to-noise target cannot be met on the draw."""


class OracleZeroResidual(ValueError):
    """A noiseless block makes the oracle RMSE zero."""


def _first_nonfinite(values: np.ndarray) -> tuple[int, int]:
    idx = np.argwhere(~np.isfinite(values))[0]
    return int(idx[0]), int(idx[1])


@dataclass
class DesignMatrix:
    """n x p feature matrix with an ordered row-block partition n_1..n_K.

    ``block_sizes`` defaults to a single block covering all rows.
    """

    values: np.ndarray
    block_sizes: tuple[int, ...] | None = None

    def __post_init__(self):
        self.values = np.asfortranarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[0] < 1 or self.values.shape[1] < 1:
            raise ShapeMismatch(f"design matrix must be 2-D and non-empty, got shape {self.values.shape}")
        if self.block_sizes is None:
            self.block_sizes = (self.values.shape[0],)
        self.block_sizes = tuple(int(b) for b in self.block_sizes)
        if any(b < 1 for b in self.block_sizes):
            raise ShapeMismatch(f"block sizes must be positive, got {self.block_sizes}")
        if sum(self.block_sizes) != self.values.shape[0]:
            raise ShapeMismatch(
                f"block sizes {self.block_sizes} sum to {sum(self.block_sizes)}, expected {self.values.shape[0]} rows"
            )
        if not np.isfinite(self.values).all():
            i, j = _first_nonfinite(self.values)
            raise NonFinite(f"design matrix has a non-finite entry at row {i}, column {j}")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @property
    def n_blocks(self) -> int:
        return len(self.block_sizes)

    def block_slices(self) -> list[slice]:
        offsets = np.concatenate(([0], np.cumsum(self.block_sizes)))
        return [slice(int(a), int(b)) for a, b in zip(offsets[:-1], offsets[1:])]


@dataclass
class TaskMatrix:
    """n x q observation matrix; a 1-D vector is treated as a single task."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim == 1:
            self.values = self.values.reshape(-1, 1)
        if self.values.ndim != 2 or self.values.shape[0] < 1 or self.values.shape[1] < 1:
            raise ShapeMismatch(f"observation matrix must be 2-D and non-empty, got shape {self.values.shape}")
        if not np.isfinite(self.values).all():
            i, j = _first_nonfinite(self.values)
            raise NonFinite(f"observation matrix has a non-finite entry at row {i}, column {j}")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def q(self) -> int:
        return self.values.shape[1]


@dataclass
class Coefficients:
    """p x q coefficient matrix with row-sparsity structure."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim == 1:
            self.values = self.values.reshape(-1, 1)
        if not np.isfinite(self.values).all():
            i, j = _first_nonfinite(self.values)
            raise NonFinite(f"coefficients have a non-finite entry at row {i}, column {j}")

    @property
    def active_rows(self) -> np.ndarray:
        """Indices of rows with nonzero Euclidean norm, in increasing order."""
        return np.flatnonzero(np.linalg.norm(self.values, axis=1) > 0)


@dataclass
class FullNoise:
    """Eigendecomposed noise square-root covariance U diag(mu) U'.

    The cached inverse and the trace are what the solver reads; the factors
    are kept so the dense matrix can be reconstructed for verification.
    """

    eigvecs: np.ndarray
    eigvals: np.ndarray
    inv: np.ndarray
    trace: float

    @property
    def n(self) -> int:
        return self.eigvecs.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.eigvecs * self.eigvals) @ self.eigvecs.T

    def diagonal(self) -> np.ndarray:
        return (self.eigvecs**2) @ self.eigvals


def identity_noise(n: int, sigma: float) -> FullNoise:
    """Full representation of sigma * I (the solver's initial noise state)."""
    eye = np.eye(n)
    return FullNoise(eye, np.full(n, sigma), eye / sigma, n * sigma)


@dataclass
class BlockNoise:
    """Block-diagonal noise square root: sigma_k on each row block."""

    sigmas: np.ndarray
    block_sizes: tuple[int, ...]

    def __post_init__(self):
        self.sigmas = np.asarray(self.sigmas, dtype=np.float64)
        self.block_sizes = tuple(int(b) for b in self.block_sizes)
        if self.sigmas.shape != (len(self.block_sizes),):
            raise ShapeMismatch("one sigma per block required")
        if np.any(self.sigmas <= 0):
            raise ValueError("block sigmas must be strictly positive")

    def diagonal(self) -> np.ndarray:
        return np.repeat(self.sigmas, self.block_sizes)


@dataclass
class IdentityNoise:
    """Fixed identity noise (plain multi-task lasso mode)."""

    def diagonal_for(self, n: int) -> np.ndarray:
        return np.ones(n)


@dataclass(frozen=True)
class SigmaFloor:
    """Strictly positive lower bound(s) on the noise scale.

    A single value is the scalar mode used by the full-covariance solver;
    K values give per-block floors for the block-homoscedastic solver.
    """

    values: tuple[float, ...]
    alpha: int = DEFAULT_FLOOR_ALPHA

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) == 0 or any(v <= 0 for v in self.values):
            raise ValueError(f"noise floors must be strictly positive, got {self.values}")

    @property
    def is_scalar(self) -> bool:
        return len(self.values) == 1

    @property
    def scalar(self) -> float:
        if not self.is_scalar:
            raise ValueError("scalar noise floor required, got per-block floors")
        return self.values[0]

    def per_block(self, n_blocks: int) -> np.ndarray:
        """Floors broadcast to ``n_blocks`` values."""
        if self.is_scalar:
            return np.full(n_blocks, self.values[0])
        if len(self.values) != n_blocks:
            raise ShapeMismatch(f"{len(self.values)} floors given for {n_blocks} blocks")
        return np.asarray(self.values)


def default_sigma_floor(
    Y: TaskMatrix,
    blocks: tuple[int, ...] | None = None,
    alpha: int = DEFAULT_FLOOR_ALPHA,
) -> SigmaFloor:
    """Data-driven noise floor: 1e-alpha times the root-mean-square of Y.

    Scalar mode (``blocks`` is None) uses the whole matrix; per-block mode
    uses each row block's own norm, so every block must be nonzero.
    """
    Yv = Y.values
    n, q = Yv.shape
    if blocks is None:
        v = 10.0 ** (-alpha) * float(np.linalg.norm(Yv)) / np.sqrt(n * q)
        if v == 0.0:
            raise ZeroBlock("observations are identically zero; default floor would be zero")
        return SigmaFloor((v,), alpha)
    blocks = tuple(int(b) for b in blocks)
    if sum(blocks) != n:
        raise ShapeMismatch(f"block sizes {blocks} do not sum to {n} rows")
    floors = []
    off = 0
    for k, nk in enumerate(blocks):
        v = 10.0 ** (-alpha) * float(np.linalg.norm(Yv[off : off + nk])) / np.sqrt(nk * q)
        if v == 0.0:
            raise ZeroBlock(f"block {k} of the observations is identically zero")
        floors.append(v)
        off += nk
    return SigmaFloor(tuple(floors), alpha)


def validate_dataset(X: DesignMatrix, Y: TaskMatrix) -> None:
    """Check that X and Y form a usable regression dataset."""
    if X.n != Y.n:
        raise ShapeMismatch(f"X has {X.n} rows but Y has {Y.n}")
    if not np.isfinite(X.values).all():
        i, j = _first_nonfinite(X.values)
        raise NonFinite(f"design matrix has a non-finite entry at row {i}, column {j}")
    if not np.isfinite(Y.values).all():
        i, j = _first_nonfinite(Y.values)
        raise NonFinite(f"observation matrix has a non-finite entry at row {i}, column {j}")


@dataclass
class SolverConfig:
    """Settings shared by all solvers.

    ``lam`` is the regularization level; ``f`` is the number of coordinate
    descent epochs between noise updates / duality-gap checks; ``tol`` is the
    relative gap threshold.  ``stop_rule`` selects the stopping criterion:
    "relative" stops at gap <= tol * primal(B=0, Sigma_max), while "ynorm"
    stops at the absolute threshold tol / ||Y||.
    """

    lam: float
    sigma_floor: SigmaFloor | None = None
    f: int = 10
    max_epochs: int = 10_000
    tol: float = 1e-6
    stop_rule: str = "relative"
    warm_start: Coefficients | None = None
    warm_noise: object | None = None

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.f < 1:
            raise ValueError(f"f must be >= 1, got {self.f}")
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.stop_rule not in ("relative", "ynorm"):
            raise ValueError(f"unknown stop_rule {self.stop_rule!r}")


@dataclass
class DualPoint:
    """n x q dual variable; feasibility is checked by the test suite."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim == 1:
            self.values = self.values.reshape(-1, 1)


@dataclass
class FitResult:
    """Converged estimate with its certified duality gap."""

    coefficients: Coefficients
    noise: object
    primal: float
    dual: float
    gap: float
    epochs_run: int
    lam: float
    lam_max: float
    gap_history: list[tuple[int, float]] = field(default_factory=list)
    converged: bool = True

    def __post_init__(self):
        if abs(self.gap - (self.primal - self.dual)) > 1e-12 * max(1.0, abs(self.primal)):
            raise ValueError("gap does not equal primal - dual")
        if self.gap < -1e-9 * max(1.0, abs(self.primal)):
            raise ValueError(f"negative duality gap {self.gap}: certificate is invalid")
