"""Compiled per-sample loops mirroring the numpy kernels."""
from __future__ import annotations

import os

import numba
import numpy as np
from numba import njit, prange

if "NUMBA_THREADING_LAYER" not in os.environ:
    # the portable pool avoids probing TBB builds that are too old to load
    numba.config.THREADING_LAYER = "workqueue"


@njit(cache=True)
def _det(A):
    """Determinant by Gaussian elimination with partial pivoting (A is overwritten)."""
    k = A.shape[0]
    d = 1.0
    for j in range(k):
        p = j
        for i in range(j + 1, k):
            if abs(A[i, j]) > abs(A[p, j]):
                p = i
        if A[p, j] == 0.0:
            return 0.0
        if p != j:
            for c in range(k):
                A[j, c], A[p, c] = A[p, c], A[j, c]
            d = -d
        d *= A[j, j]
        for i in range(j + 1, k):
            f = A[i, j] / A[j, j]
            for c in range(j + 1, k):
                A[i, c] -= f * A[j, c]
    return d


@njit(cache=True)
def _null_vector(rows):
    """Kernel vector of an (m - 1) x m matrix from signed maximal minors; SVD otherwise."""
    r, m = rows.shape
    out = np.empty(m)
    if r != m - 1:
        _, _, vt = np.linalg.svd(rows)
        out[:] = vt[m - 1, :]
        return out
    minor = np.empty((r, r))
    for k in range(m):
        for i in range(r):
            c = 0
            for j in range(m):
                if j != k:
                    minor[i, c] = rows[i, j]
                    c += 1
        out[k] = _det(minor) * (1.0 if k % 2 == 0 else -1.0)
    return out


@njit(cache=True)
def _jacobi_eigvalsh(A):
    """Ascending eigenvalues of a small symmetric matrix by cyclic Jacobi sweeps."""
    a = A.copy()
    k = a.shape[0]
    for _ in range(50):
        off = 0.0
        for i in range(k):
            for j in range(i + 1, k):
                off += a[i, j] * a[i, j]
        if off == 0.0:
            break
        for p in range(k):
            for q in range(p + 1, k):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for r in range(k):
                    arp = a[r, p]
                    arq = a[r, q]
                    a[r, p] = c * arp - s * arq
                    a[r, q] = s * arp + c * arq
                for r in range(k):
                    apr = a[p, r]
                    aqr = a[q, r]
                    a[p, r] = c * apr - s * aqr
                    a[q, r] = s * apr + c * aqr
    ev = np.empty(k)
    for i in range(k):
        ev[i] = a[i, i]
    return np.sort(ev)


@njit(cache=True)
def _solve(g, b):
    """g^{-1} b for small square g by Gaussian elimination with partial pivoting."""
    k = g.shape[0]
    A = g.copy()
    X = b.copy()
    for j in range(k):
        p = j
        for i in range(j + 1, k):
            if abs(A[i, j]) > abs(A[p, j]):
                p = i
        if p != j:
            for c in range(k):
                A[j, c], A[p, c] = A[p, c], A[j, c]
            for c in range(X.shape[1]):
                X[j, c], X[p, c] = X[p, c], X[j, c]
        for i in range(j + 1, k):
            f = A[i, j] / A[j, j]
            for c in range(j, k):
                A[i, c] -= f * A[j, c]
            for c in range(X.shape[1]):
                X[i, c] -= f * X[j, c]
    for j in range(k - 1, -1, -1):
        for c in range(X.shape[1]):
            acc = X[j, c]
            for i in range(j + 1, k):
                acc -= A[j, i] * X[i, c]
            X[j, c] = acc / A[j, j]
    return X


@njit(cache=True)
def _quad(G, u, v):
    acc = 0.0
    for i in range(G.shape[0]):
        for j in range(G.shape[1]):
            acc += u[i] * G[i, j] * v[j]
    return acc


@njit(cache=True)
def _reduce_one(hh, g):
    n = g.shape[0]
    for a in range(n):
        for c in range(a + 1, n):
            v = 0.5 * (hh[a, c] + hh[c, a])
            hh[a, c] = v
            hh[c, a] = v
    gev = _jacobi_eigvalsh(g)
    cond = gev[n - 1] / gev[0] if gev[0] > 0 else np.inf
    # Cholesky g = L L^T, then M = L^{-1} hh L^{-T}
    L = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            acc = g[i, j]
            for k in range(j):
                acc -= L[i, k] * L[j, k]
            if i == j:
                if not acc > 0.0:
                    # exceptions do not leave prange loops; report through NaN and cond
                    return np.full(n, np.nan), np.full((n, n), np.nan), np.inf
                L[i, i] = np.sqrt(acc)
            else:
                L[i, j] = acc / L[j, j]
    Y = np.empty((n, n))
    for c in range(n):
        for i in range(n):
            acc = hh[i, c]
            for k in range(i):
                acc -= L[i, k] * Y[k, c]
            Y[i, c] = acc / L[i, i]
    M = np.empty((n, n))
    for r in range(n):
        for i in range(n):
            acc = Y[r, i]
            for k in range(i):
                acc -= L[i, k] * M[r, k]
            M[r, i] = acc / L[i, i]
    M = 0.5 * (M + M.T)
    eig = _jacobi_eigvalsh(M)
    S = _solve(g, hh)
    return eig, S, cond


@njit(parallel=True, cache=True)
def flat_shape_operator(P, sig, mask, ref, h):
    B, C, _, m = P.shape
    n = (C - 1) // 2
    use_radial = False
    for k in range(m):
        if mask[k] != 0.0:
            use_radial = True
    r = n + 1 if use_radial else n
    eig = np.empty((B, n))
    S = np.empty((B, n, n))
    Nout = np.empty((B, m))
    Xout = np.empty((B, n, m))
    cond = np.empty(B)
    for b in prange(B):
        N = np.empty((C, m))
        X0 = np.empty((n, m))
        for c in range(C):
            rows = np.zeros((r, m))
            for a in range(n):
                for k in range(m):
                    rows[a, k] = (P[b, c, 1 + 2 * a, k] - P[b, c, 2 + 2 * a, k]) / (2.0 * h)
            if c == 0:
                X0[:, :] = rows[:n, :]
            if use_radial:
                for k in range(m):
                    rows[n, k] = P[b, c, 0, k] * mask[k]
            for k in range(m):
                for a in range(r):
                    rows[a, k] *= sig[k]
            nv = _null_vector(rows)
            q = 0.0
            for k in range(m):
                q += nv[k] * nv[k] * sig[k]
            nv /= np.sqrt(abs(q))
            N[c, :] = nv
        s0 = 0.0
        for k in range(m):
            s0 += N[0, k] * ref[b, k] * sig[k]
        if s0 < 0:
            N[0, :] = -N[0, :]
        for c in range(1, C):
            d = 0.0
            for k in range(m):
                d += N[c, k] * N[0, k]
            if d < 0:
                N[c, :] = -N[c, :]
        hh = np.zeros((n, n))
        g = np.zeros((n, n))
        for a in range(n):
            for e in range(n):
                acc = 0.0
                acc_g = 0.0
                for k in range(m):
                    dn = (N[1 + 2 * a, k] - N[2 + 2 * a, k]) / (2.0 * h)
                    acc -= dn * sig[k] * X0[e, k]
                    acc_g += X0[a, k] * sig[k] * X0[e, k]
                hh[a, e] = acc
                g[a, e] = acc_g
        ev, Sb, cb = _reduce_one(hh, g)
        eig[b, :] = ev
        S[b, :, :] = Sb
        cond[b] = cb
        Nout[b, :] = N[0, :]
        Xout[b, :, :] = X0
    return eig, S, Nout, Xout, cond


@njit(parallel=True, cache=True)
def chart_shape_operator(P, G, dG, ref, h):
    B, C, _, m = P.shape
    n = (C - 1) // 2
    eig = np.empty((B, n))
    S = np.empty((B, n, n))
    Nout = np.empty((B, m))
    Xout = np.empty((B, n, m))
    cond = np.empty(B)
    for b in prange(B):
        N = np.empty((C, m))
        X0 = np.empty((n, m))
        for c in range(C):
            rows = np.empty((n, m))
            for a in range(n):
                for k in range(m):
                    rows[a, k] = (P[b, c, 1 + 2 * a, k] - P[b, c, 2 + 2 * a, k]) / (2.0 * h)
            if c == 0:
                X0[:, :] = rows
            nu = _null_vector(rows)
            Gc = G[b, c].copy()
            nv = _solve(Gc, nu.reshape(m, 1))[:, 0]
            N[c, :] = nv / np.sqrt(_quad(Gc, nv, nv))
        G0 = G[b, 0].copy()
        if _quad(G0, N[0], ref[b]) < 0:
            N[0, :] = -N[0, :]
        for c in range(1, C):
            d = 0.0
            for k in range(m):
                d += N[c, k] * N[0, k]
            if d < 0:
                N[c, :] = -N[c, :]
        Ginv = _solve(G0, np.eye(m))
        first = np.empty((m, m, m))
        for l in range(m):
            for i in range(m):
                for j in range(m):
                    first[l, i, j] = 0.5 * (dG[b, i, l, j] + dG[b, j, l, i] - dG[b, l, i, j])
        gamma = np.zeros((m, m, m))
        for k in range(m):
            for l in range(m):
                for i in range(m):
                    for j in range(m):
                        gamma[k, i, j] += Ginv[k, l] * first[l, i, j]
        cov = np.empty((n, m))
        for a in range(n):
            for k in range(m):
                acc = (N[1 + 2 * a, k] - N[2 + 2 * a, k]) / (2.0 * h)
                for i in range(m):
                    for j in range(m):
                        acc += gamma[k, i, j] * X0[a, i] * N[0, j]
                cov[a, k] = acc
        hh = np.empty((n, n))
        g = np.empty((n, n))
        for a in range(n):
            for e in range(n):
                hh[a, e] = -_quad(G0, cov[a], X0[e])
                g[a, e] = _quad(G0, X0[a], X0[e])
        ev, Sb, cb = _reduce_one(hh, g)
        eig[b, :] = ev
        S[b, :, :] = Sb
        cond[b] = cb
        Nout[b, :] = N[0, :]
        Xout[b, :, :] = X0
    return eig, S, Nout, Xout, cond
