"""Vectorized numpy shape-operator kernels.

Both kernels take a nested central-difference stencil ``P`` of shape
(B, C, C, m) with C = 1 + 2n: ``P[b, c]`` holds the point at stencil center
``c`` followed by its neighbours at +h e_a and -h e_a (index 1 + 2a and
2 + 2a), and center 0 is the sample itself.  They return

    eig    (B, n)     eigenvalues of A, ascending
    S      (B, n, n)  A = g^{-1} h in the coordinate frame
    N      (B, m)     unit normal at the sample
    X      (B, n, m)  coordinate tangents at the sample
    cond   (B,)       condition number of g
"""
from __future__ import annotations

import numpy as np


def _tangents(P, h):
    return (P[:, :, 1::2] - P[:, :, 2::2]) / (2.0 * h)


def _align(N, ref_fn):
    """Flip each center normal to agree with the reference, then neighbours with the center."""
    s0 = np.sign(ref_fn(N[:, 0]))
    s0[s0 == 0] = 1.0
    N = N * s0[:, None, None]
    s = np.sign(np.sum(N * N[:, :1], axis=-1))
    s[s == 0] = 1.0
    return N * s[..., None]


def _reduce(h, X, g):
    h = 0.5 * (h + np.swapaxes(h, -1, -2))
    cond = np.linalg.cond(g)
    L = np.linalg.cholesky(g)
    Linv = np.linalg.inv(L)
    M = Linv @ h @ np.swapaxes(Linv, -1, -2)
    eig = np.linalg.eigvalsh(0.5 * (M + np.swapaxes(M, -1, -2)))
    S = np.linalg.solve(g, h)
    return eig, S, cond


def flat_shape_operator(P, sig, mask, ref, h):
    """Oracle in a flat ambient with diagonal metric ``sig``.

    ``mask`` selects the coordinates of the quadric the surface lies on (the
    radial direction x * mask is then normal to the ambient), or is all zero.
    ``ref`` gives the orientation; a zero row leaves the SVD sign.
    """
    P = np.asarray(P, dtype=float)
    B, C, _, m = P.shape
    n = (C - 1) // 2
    Xc = _tangents(P, h)
    rows = Xc
    if np.any(mask):
        radial = P[:, :, 0] * mask
        rows = np.concatenate([Xc, radial[:, :, None, :]], axis=2)
    _, _, vt = np.linalg.svd(rows * sig, full_matrices=True)
    N = vt[..., -1, :]
    N = N / np.sqrt(np.abs(np.sum(N * N * sig, axis=-1)))[..., None]
    N = _align(N, lambda v: np.sum(v * ref * sig, axis=-1))
    DN = (N[:, 1::2] - N[:, 2::2]) / (2.0 * h)
    X = Xc[:, 0]
    hh = -np.einsum("bam,bcm->bac", DN * sig, X)
    g = np.einsum("bam,bcm->bac", X * sig, X)
    eig, S, cond = _reduce(hh, X, g)
    return eig, S, N[:, 0], X, cond


def chart_shape_operator(P, G, dG, ref, h):
    """Oracle for a hypersurface of a Riemannian chart.

    ``G`` (B, C, m, m) is the metric at every stencil center and
    ``dG[b, k, i, j]`` the derivative d_k g_ij at the sample.  ``ref`` is a
    vector in chart components used for the orientation.
    """
    P = np.asarray(P, dtype=float)
    B, C, _, m = P.shape
    Xc = _tangents(P, h)
    _, _, vt = np.linalg.svd(Xc, full_matrices=True)
    nu = vt[..., -1, :]
    N = np.linalg.solve(G, nu[..., None])[..., 0]
    N = N / np.sqrt(np.einsum("bci,bcij,bcj->bc", N, G, N))[..., None]
    G0 = G[:, 0]
    N = _align(N, lambda v: np.einsum("bi,bij,bj->b", v, G0, ref))
    Ginv = np.linalg.inv(G0)
    # first kind [l, i, j] = (d_i g_lj + d_j g_li - d_l g_ij) / 2
    first = 0.5 * (np.einsum("bilj->blij", dG) + np.einsum("bjli->blij", dG) - dG)
    gamma = np.einsum("bkl,blij->bkij", Ginv, first)
    DN = (N[:, 1::2] - N[:, 2::2]) / (2.0 * h)
    X = Xc[:, 0]
    N0 = N[:, 0]
    cov = DN + np.einsum("bkij,bai,bj->bak", gamma, X, N0)
    hh = -np.einsum("bak,bkl,bcl->bac", cov, G0, X)
    g = np.einsum("bai,bij,bcj->bac", X, G0, X)
    eig, S, cond = _reduce(hh, X, g)
    return eig, S, N0, X, cond
