"""Independent reference implementations used as oracles by the tests.

These deliberately share no code with the package solvers: the multi-task
lasso reference is accelerated proximal gradient on the same objective
min ||Y - X B||^2 / (2 n q) + lam * sum_j ||B_j||.
"""
import numpy as np


def prox_grad_mtl(Xv, Yv, lam, max_iter=100_000, tol=1e-14):
    """FISTA with gradient steps on the quadratic term and row-wise
    Euclidean shrinkage; runs to near machine precision."""
    n, p = Xv.shape
    q = Yv.shape[1]
    lip = np.linalg.norm(Xv, 2) ** 2 / (n * q)
    step = 1.0 / lip
    G = Xv.T @ Xv
    XtY = Xv.T @ Yv
    B = np.zeros((p, q))
    Z = B.copy()
    t = 1.0
    for _ in range(max_iter):
        grad = (G @ Z - XtY) / (n * q)
        V = Z - step * grad
        nrm = np.linalg.norm(V, axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(nrm > 0, np.maximum(1.0 - step * lam / nrm, 0.0), 0.0)
        B_new = V * scale
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        Z = B_new + ((t - 1.0) / t_new) * (B_new - B)
        delta = np.max(np.abs(B_new - B))
        B, t = B_new, t_new
        if delta <= tol * max(1.0, np.max(np.abs(B))):
            break
    return B


def mtl_objective(Xv, Yv, B, lam):
    n, q = Yv.shape
    R = Yv - Xv @ B
    return float(np.sum(R * R)) / (2 * n * q) + lam * float(np.sum(np.linalg.norm(B, axis=1)))


def dense_primal_full(B, Sigma, Xv, Yv, lam):
    """Full-noise objective evaluated from a dense square root via a linear
    solve (no cached inverses), for convexity and optimality checks."""
    n, q = Yv.shape
    R = Yv - Xv @ B
    quad = float(np.sum(R * np.linalg.solve(Sigma, R)))
    l21 = float(np.sum(np.linalg.norm(np.atleast_2d(B), axis=1)))
    return quad / (2 * n * q) + float(np.trace(Sigma)) / (2 * n) + lam * l21


def sigma_objective(Sigma, Z):
    """Data-fit plus trace objective that the noise square-root update is
    claimed to minimize over Sigma >= floor * I (up to a constant factor)."""
    return float(np.sum(Z * np.linalg.solve(Sigma, Z))) + float(np.trace(Sigma))


def project_floor_psd(S, floor):
    """Nearest-in-eigenvalues projection of a symmetric matrix onto
    {Sigma : Sigma >= floor * I}."""
    S = 0.5 * (S + S.T)
    w, U = np.linalg.eigh(S)
    return (U * np.maximum(w, floor)) @ U.T
