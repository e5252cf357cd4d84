"""Compiled coordinate-descent inner loops.

Both kernels process coefficient rows j0..j1-1 in place; calling them with a
single row is the public per-step operation, with the full range one epoch.
All loops are sequential scalar arithmetic, so results are deterministic.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def sgcl_cd_steps(Xv, SinvX, SinvR, B, L, lam, j0, j1):
    """Whitened-residual coordinate descent: for each row, exact minimization
    via norm shrinkage of B_j + X_j' SinvR / L_j at level lam*n*q / L_j."""
    n, q = SinvR.shape
    tau0 = lam * n * q
    u = np.empty(q)
    delta = np.empty(q)
    for j in range(j0, j1):
        Lj = L[j]
        if Lj <= 0.0:
            for t in range(q):
                B[j, t] = 0.0
            continue
        for t in range(q):
            u[t] = 0.0
        for i in range(n):
            xij = Xv[i, j]
            if xij != 0.0:
                for t in range(q):
                    u[t] += xij * SinvR[i, t]
        unorm2 = 0.0
        for t in range(q):
            acc = B[j, t] + u[t] / Lj
            u[t] = acc
            unorm2 += acc * acc
        unorm = np.sqrt(unorm2)
        tau = tau0 / Lj
        moved = False
        if unorm <= tau:
            for t in range(q):
                delta[t] = -B[j, t]
                if delta[t] != 0.0:
                    moved = True
                B[j, t] = 0.0
        else:
            scale = 1.0 - tau / unorm
            for t in range(q):
                nb = scale * u[t]
                delta[t] = nb - B[j, t]
                if delta[t] != 0.0:
                    moved = True
                B[j, t] = nb
        if not moved:
            continue
        for i in range(n):
            sx = SinvX[i, j]
            if sx != 0.0:
                for t in range(q):
                    SinvR[i, t] -= sx * delta[t]


@njit(cache=True)
def block_cd_steps(Xv, R, B, sigmas, sqn, L, floors, rms_denom, starts, lam, sigma_fixed, j0, j1):
    """Block-homoscedastic coordinate descent with O(Kq) incremental updates
    of the cached squared block norms and a closed-form refresh of every
    sigma_k after each row update (skipped when sigma_fixed)."""
    n, q = R.shape
    K = starts.shape[0] - 1
    tau = lam * n * q
    h = np.empty((K, q))
    u = np.empty(q)
    delta = np.empty(q)
    for j in range(j0, j1):
        c = 0.0
        for k in range(K):
            c += L[k, j] / sigmas[k]
        if c <= 0.0:
            for t in range(q):
                B[j, t] = 0.0
            continue
        for k in range(K):
            for t in range(q):
                h[k, t] = 0.0
            for i in range(starts[k], starts[k + 1]):
                xij = Xv[i, j]
                if xij != 0.0:
                    for t in range(q):
                        h[k, t] += xij * R[i, t]
        unorm2 = 0.0
        for t in range(q):
            acc = c * B[j, t]
            for k in range(K):
                acc += h[k, t] / sigmas[k]
            u[t] = acc
            unorm2 += acc * acc
        unorm = np.sqrt(unorm2)
        moved = False
        if unorm <= tau:
            for t in range(q):
                delta[t] = B[j, t]
                if delta[t] != 0.0:
                    moved = True
                B[j, t] = 0.0
        else:
            scale = (1.0 - tau / unorm) / c
            for t in range(q):
                nb = scale * u[t]
                delta[t] = B[j, t] - nb
                if delta[t] != 0.0:
                    moved = True
                B[j, t] = nb
        if not moved:
            continue
        dsq = 0.0
        for t in range(q):
            dsq += delta[t] * delta[t]
        for k in range(K):
            hd = 0.0
            for t in range(q):
                hd += h[k, t] * delta[t]
            sqn[k] += 2.0 * hd + dsq * L[k, j]
            for i in range(starts[k], starts[k + 1]):
                xij = Xv[i, j]
                if xij != 0.0:
                    for t in range(q):
                        R[i, t] += xij * delta[t]
        if not sigma_fixed:
            for k in range(K):
                v = sqn[k]
                if v < 0.0:
                    v = 0.0
                s = np.sqrt(v) / rms_denom[k]
                sigmas[k] = s if s > floors[k] else floors[k]
