"""Block-homoscedastic concomitant solver: one noise scale per known row
block, refreshed in closed form after every coordinate update thanks to
incrementally maintained squared residual norms.

    min over B, sigma_k >= floor_k of
        sum_k ( ||Y^k - X^k B||^2 / (2 n q sigma_k) + n_k sigma_k / (2 n) )
        + lam ||B||_{2,1}

The same machinery provides the single-noise-level solver (K = 1) and the
plain multi-task lasso (sigma frozen at 1), each with its own duality gap.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ._kernels import block_cd_steps
from .math_ops import l21_norm, row_norm_2inf
from .types import (
    BlockNoise,
    Coefficients,
    DegenerateProblem,
    DesignMatrix,
    DualPoint,
    FitResult,
    IdentityNoise,
    ShapeMismatch,
    SigmaFloor,
    SolverConfig,
    TaskMatrix,
    validate_dataset,
)

_ZERO_GAP_SLACK = 16 * np.finfo(np.float64).eps


@dataclass
class SbhclState:
    """Mutable solver state.  ``sq_res_norms`` caches ||R^k||^2 so each
    noise refresh costs O(K); ``L`` holds the per-block column energies;
    ``starts`` are the block row offsets."""

    B: np.ndarray
    sigmas: np.ndarray
    sq_res_norms: np.ndarray
    R: np.ndarray
    L: np.ndarray
    floors: np.ndarray
    rms_denom: np.ndarray
    slices: list[slice]
    starts: np.ndarray
    sigma_fixed: bool = False
    epoch: int = 0


def _block_floors(floor, n_blocks: int) -> np.ndarray:
    if isinstance(floor, SigmaFloor):
        return floor.per_block(n_blocks)
    arr = np.atleast_1d(np.asarray(floor, dtype=np.float64))
    if arr.shape == (1,):
        return np.full(n_blocks, arr[0])
    if arr.shape != (n_blocks,):
        raise ShapeMismatch(f"{arr.shape[0]} floors given for {n_blocks} blocks")
    return arr


def _block_sq_norms(R: np.ndarray, slices: list[slice]) -> np.ndarray:
    return np.array([float(np.sum(R[sl] ** 2)) for sl in slices])


def make_sbhcl_state(
    X: DesignMatrix,
    Y: TaskMatrix,
    B: np.ndarray,
    floors,
    sigmas: np.ndarray | None = None,
    sigma_fixed: bool = False,
) -> SbhclState:
    """Build a state whose residual, norms and noise scales agree with B."""
    Xv, Yv = X.values, Y.values
    q = Yv.shape[1]
    slices = X.block_slices()
    K = len(slices)
    floors = _block_floors(floors, K)
    R = Yv - Xv @ B
    sqn = _block_sq_norms(R, slices)
    rms_denom = np.sqrt(np.asarray(X.block_sizes, dtype=np.float64) * q)
    L = np.empty((K, Xv.shape[1]))
    for k, sl in enumerate(slices):
        L[k] = np.einsum("ij,ij->j", Xv[sl], Xv[sl])
    if sigmas is None:
        sigmas = np.ones(K) if sigma_fixed else np.maximum(floors, np.sqrt(sqn) / rms_denom)
    starts = np.concatenate(([0], np.cumsum(X.block_sizes))).astype(np.int64)
    return SbhclState(
        B=np.array(B, dtype=np.float64),
        sigmas=np.asarray(sigmas, dtype=np.float64).copy(),
        sq_res_norms=sqn,
        R=np.ascontiguousarray(R),
        L=L,
        floors=floors,
        rms_denom=rms_denom,
        slices=slices,
        starts=starts,
        sigma_fixed=sigma_fixed,
    )


def lambda_max_sbhcl(X: DesignMatrix, Y: TaskMatrix, floors) -> float:
    """Critical regularization level, computed at the B = 0 noise scales."""
    validate_dataset(X, Y)
    lm = _lambda_max_blocks(X, Y, _block_floors(floors, X.n_blocks))
    if lm <= 0.0:
        raise DegenerateProblem("critical regularization level is zero (X'Y = 0)")
    return lm


def _sigma_at_zero(X: DesignMatrix, Y: TaskMatrix, floors: np.ndarray) -> np.ndarray:
    sqn = _block_sq_norms(Y.values, X.block_slices())
    denom = np.sqrt(np.asarray(X.block_sizes, dtype=np.float64) * Y.q)
    return np.maximum(floors, np.sqrt(sqn) / denom)


def _lambda_max_blocks(X: DesignMatrix, Y: TaskMatrix, floors: np.ndarray) -> float:
    sig = _sigma_at_zero(X, Y, floors)
    V = Y.values / np.repeat(sig, X.block_sizes)[:, None]
    return row_norm_2inf(X.values.T @ V) / (X.n * Y.q)


def primal_sbhcl(B: np.ndarray, sigmas: np.ndarray, X: DesignMatrix, Y: TaskMatrix, lam: float) -> float:
    if B.ndim == 1:
        B = B.reshape(-1, 1)
    n, q = Y.values.shape
    R = Y.values - X.values @ B
    sqn = _block_sq_norms(R, X.block_slices())
    nk = np.asarray(X.block_sizes, dtype=np.float64)
    return float(np.sum(sqn / (2 * n * q * sigmas)) + np.sum(nk * sigmas) / (2 * n)) + lam * l21_norm(B)


def dual_point_sbhcl(R: np.ndarray, sigmas: np.ndarray, X: DesignMatrix, lam: float, blocks) -> DualPoint:
    """Feasible dual point along the blockwise-whitened residual, scaled to
    the link equation whenever that scaling is feasible."""
    n, q = R.shape
    V = R / np.repeat(sigmas, blocks)[:, None]
    if not V.any():
        return DualPoint(np.zeros((n, q)))
    a = row_norm_2inf(X.values.T @ V)
    off = 0
    for k, nk in enumerate(blocks):
        vk = float(np.linalg.norm(V[off : off + nk]))
        a = max(a, n * lam * np.sqrt(q / nk) * vk)
        off += nk
    link = n * q * lam
    if link >= a:
        a = link
    return DualPoint(V / a)


def dual_sbhcl(theta: DualPoint, Y: TaskMatrix, floors, lam: float, n: int, q: int, blocks) -> float:
    T = theta.values
    floors = _block_floors(floors, len(blocks))
    val = lam * float(np.sum(Y.values * T))
    off = 0
    for k, nk in enumerate(blocks):
        tk_sq = float(np.sum(T[off : off + nk] ** 2))
        val += 0.5 * floors[k] * (nk / n - n * q * lam**2 * tk_sq)
        off += nk
    return val


def bcd_step_sbhcl(state: SbhclState, X: DesignMatrix, lam: float, j: int) -> SbhclState:
    """Update one coefficient row by shrinkage of the blockwise-whitened
    partial-residual correlation, then refresh the residual, the cached
    block norms (O(Kq) via the inner products already needed for the
    threshold), and every noise scale."""
    block_cd_steps(
        X.values,
        state.R,
        state.B,
        state.sigmas,
        state.sq_res_norms,
        state.L,
        state.floors,
        state.rms_denom,
        state.starts,
        lam,
        state.sigma_fixed,
        j,
        j + 1,
    )
    return state


def _dual_point_fixed(R: np.ndarray, X: DesignMatrix, lam: float) -> DualPoint:
    n, q = R.shape
    if not R.any():
        return DualPoint(np.zeros((n, q)))
    a = row_norm_2inf(X.values.T @ R)
    link = n * q * lam
    if link >= a:
        a = link
    return DualPoint(R / a)


def _dual_fixed(theta: DualPoint, Y: TaskMatrix, lam: float, n: int, q: int) -> float:
    T = theta.values
    return lam * float(np.sum(Y.values * T)) - 0.5 * n * q * lam**2 * float(np.sum(T * T))


def _stop_threshold(config: SolverConfig, gap_scale: float, y_norm: float) -> float:
    if config.stop_rule == "ynorm":
        return config.tol / y_norm if y_norm > 0 else np.inf
    return config.tol * gap_scale


def _fit_block(X: DesignMatrix, Y: TaskMatrix, config: SolverConfig, fixed_identity: bool) -> FitResult:
    validate_dataset(X, Y)
    Xv, Yv = X.values, Y.values
    n, q = Yv.shape
    p = Xv.shape[1]
    blocks = X.block_sizes
    K = len(blocks)
    nk = np.asarray(blocks, dtype=np.float64)
    lam = config.lam

    if fixed_identity:
        floors = np.ones(K)
        lam_max = row_norm_2inf(Xv.T @ Yv) / (n * q)
        gap_scale = float(np.sum(Yv**2)) / (2 * n * q)
    else:
        if config.sigma_floor is None:
            raise ValueError("config.sigma_floor is required")
        floors = _block_floors(config.sigma_floor, K)
        sig0 = _sigma_at_zero(X, Y, floors)
        lam_max = _lambda_max_blocks(X, Y, floors)
        ysq = _block_sq_norms(Yv, X.block_slices())
        gap_scale = float(np.sum(ysq / (2 * n * q * sig0)) + np.sum(nk * sig0) / (2 * n))
    threshold = _stop_threshold(config, gap_scale, float(np.linalg.norm(Yv)))

    if config.warm_start is not None:
        B0 = np.array(config.warm_start.values, dtype=np.float64).reshape(p, q)
    else:
        B0 = np.zeros((p, q))
    warm_sigmas = None
    if not fixed_identity and isinstance(config.warm_noise, BlockNoise):
        warm_sigmas = np.maximum(floors, config.warm_noise.sigmas)
    state = make_sbhcl_state(X, Y, B0, floors, sigmas=warm_sigmas, sigma_fixed=fixed_identity)

    history: list[tuple[int, float]] = []
    best = None
    epochs_done = 0
    converged = False
    while True:
        # Certification: residual and block norms recomputed from scratch.
        R = Yv - Xv @ state.B
        state.R = R
        state.sq_res_norms = _block_sq_norms(R, state.slices)
        penalty = lam * l21_norm(state.B)
        if fixed_identity:
            primal = float(state.sq_res_norms.sum()) / (2 * n * q) + penalty
            theta = _dual_point_fixed(R, X, lam)
            gap = primal - _dual_fixed(theta, Y, lam, n, q)
        else:
            state.sigmas = np.maximum(floors, np.sqrt(state.sq_res_norms) / state.rms_denom)
            primal = (
                float(np.sum(state.sq_res_norms / (2 * n * q * state.sigmas)))
                + float(np.sum(nk * state.sigmas)) / (2 * n)
                + penalty
            )
            theta = dual_point_sbhcl(R, state.sigmas, X, lam, blocks)
            gap = primal - dual_sbhcl(theta, Y, floors, lam, n, q, blocks)
        history.append((epochs_done, gap))
        if best is None or gap < best[0]:
            best = (gap, state.B.copy(), state.sigmas.copy(), primal)
        if gap <= threshold or gap <= _ZERO_GAP_SLACK * max(1.0, abs(primal)):
            converged = True
            break
        if epochs_done >= config.max_epochs:
            break
        for _ in range(min(config.f, config.max_epochs - epochs_done)):
            block_cd_steps(Xv, state.R, state.B, state.sigmas, state.sq_res_norms, state.L,
                           state.floors, state.rms_denom, state.starts, lam, state.sigma_fixed, 0, p)
            state.epoch += 1
            epochs_done += 1

    gap, B, sigmas, primal = best
    noise = IdentityNoise() if fixed_identity else BlockNoise(sigmas, blocks)
    return FitResult(
        coefficients=Coefficients(B),
        noise=noise,
        primal=primal,
        dual=primal - gap,
        gap=gap,
        epochs_run=epochs_done,
        lam=lam,
        lam_max=lam_max,
        gap_history=history,
        converged=converged,
    )


def fit_sbhcl(X: DesignMatrix, Y: TaskMatrix, config: SolverConfig) -> FitResult:
    """Fit with one jointly estimated noise scale per row block."""
    return _fit_block(X, Y, config, fixed_identity=False)


def fit_scl(X: DesignMatrix, Y, config: SolverConfig) -> FitResult:
    """Single noise level for all rows: the K = 1 specialization."""
    Ym = Y if isinstance(Y, TaskMatrix) else TaskMatrix(np.asarray(Y))
    X1 = DesignMatrix(X.values, (X.n,))
    return fit_sbhcl(X1, Ym, config)


def fit_mtl(X: DesignMatrix, Y: TaskMatrix, config: SolverConfig) -> FitResult:
    """Plain multi-task lasso: noise frozen at the identity, so this solves
    min ||Y - X B||^2 / (2 n q) + lam ||B||_{2,1} with its own gap."""
    return _fit_block(X, Y, config, fixed_identity=True)


def lambda_max_mtl(X: DesignMatrix, Y: TaskMatrix) -> float:
    """Critical regularization level of the plain multi-task lasso."""
    validate_dataset(X, Y)
    lm = row_norm_2inf(X.values.T @ Y.values) / (X.n * Y.q)
    if lm <= 0.0:
        raise DegenerateProblem("critical regularization level is zero (X'Y = 0)")
    return lm


_FITTERS = {"sgcl": None, "sbhcl": fit_sbhcl, "scl": fit_scl, "mtl": fit_mtl}


def default_lambda_grid(lam_max: float, num: int = 15, ratio_min: float = 0.1) -> np.ndarray:
    """Descending logarithmic grid from lam_max down to ratio_min * lam_max."""
    return lam_max * np.geomspace(1.0, ratio_min, num)


def fit_path(
    X: DesignMatrix,
    Y: TaskMatrix,
    kind: str,
    grid,
    config: SolverConfig,
) -> list[FitResult | None]:
    """Fit a descending grid of regularization levels, warm-starting each fit
    from the previous solution.  A failed grid point yields None and the path
    continues."""
    from .sgcl import fit_sgcl  # local import to avoid a module cycle

    fitters = dict(_FITTERS)
    fitters["sgcl"] = fit_sgcl
    if kind not in fitters:
        raise ValueError(f"unknown solver kind {kind!r}")
    fit = fitters[kind]
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or len(grid) == 0:
        raise ValueError("grid must be a non-empty 1-D sequence")
    if np.any(np.diff(grid) >= 0):
        if len(grid) > 1:
            raise ValueError("grid must be strictly decreasing")
    results: list[FitResult | None] = []
    warm = config.warm_start
    for lam in grid:
        cfg = replace(config, lam=float(lam), warm_start=warm, warm_noise=None)
        try:
            res = fit(X, Y, cfg)
        except Exception:
            results.append(None)
            continue
        results.append(res)
        warm = res.coefficients
    return results
