"""Linear models of the space forms S^n and H^n.

S^n is the unit sphere of Euclidean R^{n+1}; H^n is the upper sheet of the
hyperboloid <x, x> = -1 in Lorentzian R^{n,1} with signature (-, +, ..., +)
on coordinate 0.  Every function accepts stacked inputs along leading axes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

MODEL_TOL = 1e-12
UNIT_TOL = 1e-9


@dataclass(frozen=True)
class SpaceForm:
    """Space form Q^n_eps of sectional curvature ``epsilon`` and dimension ``dim``."""

    epsilon: int
    dim: int

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise DomainError(f"epsilon must be 1 or -1, got {self.epsilon}")
        if int(self.dim) != self.dim or self.dim < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.dim}")

    @property
    def ambient_dim(self) -> int:
        return self.dim + 1

    @property
    def signature(self) -> np.ndarray:
        sig = np.ones(self.dim + 1)
        if self.epsilon == -1:
            sig[0] = -1.0
        return sig

    @property
    def name(self) -> str:
        return "S" if self.epsilon == 1 else "H"

    def origin(self) -> np.ndarray:
        """The base point e_0, which lies on both models."""
        e0 = np.zeros(self.dim + 1)
        e0[0] = 1.0
        return e0

    def basis_vector(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim + 1)
        e[i] = 1.0
        return e


def sphere(n: int) -> SpaceForm:
    return SpaceForm(1, n)


def hyperbolic(n: int) -> SpaceForm:
    return SpaceForm(-1, n)


def _check_len(space: SpaceForm, *arrays):
    for a in arrays:
        if np.shape(a)[-1] != space.dim + 1:
            raise DomainError(
                f"expected vectors of length {space.dim + 1}, got shape {np.shape(a)}"
            )


def model_inner(space: SpaceForm, u, v) -> np.ndarray:
    """Euclidean (eps=1) or Lorentzian (eps=-1) inner product along the last axis."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_len(space, u, v)
    return np.sum(u * v * space.signature, axis=-1)


def model_norm(space: SpaceForm, v) -> np.ndarray:
    """Length of a spacelike / tangent vector."""
    return np.sqrt(np.abs(model_inner(space, v, v)))


def constraint_residual(space: SpaceForm, x) -> np.ndarray:
    """|<x, x> - eps|, the distance-to-quadric test used by the invariants."""
    return np.abs(model_inner(space, x, x) - space.epsilon)


def is_model_point(space: SpaceForm, x, tol: float = MODEL_TOL) -> bool:
    x = np.asarray(x, dtype=float)
    ok = np.all(constraint_residual(space, x) <= tol)
    if space.epsilon == -1:
        ok = ok and bool(np.all(x[..., 0] >= 1.0 - tol))
    return bool(ok)


def normalize(space: SpaceForm, x) -> np.ndarray:
    """Radially rescale ``x`` back onto the model quadric."""
    x = np.asarray(x, dtype=float)
    q = model_inner(space, x, x)
    if space.epsilon == 1:
        return x / np.sqrt(q)[..., None]
    if np.any(q >= 0):
        raise DomainError("cannot normalize a non-timelike vector onto H^n")
    y = x / np.sqrt(-q)[..., None]
    return np.where(y[..., :1] < 0, -y, y)


def project_tangent(space: SpaceForm, p, w) -> np.ndarray:
    """Orthogonal projection of ``w`` onto T_p Q^n_eps.

    Since <p, p> = eps the projection is w - eps <w, p> p, which reads
    w - <w,p>p on the sphere and w + <w,p>p on the hyperboloid.
    """
    p = np.asarray(p, dtype=float)
    w = np.asarray(w, dtype=float)
    _check_len(space, p, w)
    return w - space.epsilon * model_inner(space, w, p)[..., None] * p


def geodesic(space: SpaceForm, p, v, s) -> np.ndarray:
    """Point at arclength ``s`` on the unit-speed geodesic through ``p`` with velocity ``v``."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_len(space, p, v)
    if np.any(np.abs(model_inner(space, v, v) - 1.0) > UNIT_TOL):
        raise DomainError("geodesic velocity must be a unit vector")
    s = np.asarray(s, dtype=float)[..., None]
    if space.epsilon == 1:
        x = np.cos(s) * p + np.sin(s) * v
    else:
        x = np.cosh(s) * p + np.sinh(s) * v
    return normalize(space, x)


def geodesic_velocity(space: SpaceForm, p, v, s) -> np.ndarray:
    """Derivative in ``s`` of :func:`geodesic`."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    s = np.asarray(s, dtype=float)[..., None]
    if space.epsilon == 1:
        return -np.sin(s) * p + np.cos(s) * v
    return np.sinh(s) * p + np.cosh(s) * v


def distance(space: SpaceForm, x, y) -> np.ndarray:
    """Intrinsic distance between two model points."""
    q = model_inner(space, x, y)
    if space.epsilon == 1:
        return np.arccos(np.clip(q, -1.0, 1.0))
    return np.arccosh(np.maximum(-q, 1.0))


def orthonormal_complement(space: SpaceForm, vectors) -> np.ndarray:
    """Orthonormal basis (rows) of the model-orthogonal complement of ``vectors``.

    The complement is assumed spacelike, which holds whenever ``vectors``
    contains a timelike vector or spans a degenerate plane together with one.
    Gram-Schmidt runs against the standard basis in index order.
    """
    sig = space.signature
    fixed = [np.asarray(v, dtype=float) for v in vectors]
    gram = np.array([[np.sum(a * b * sig) for b in fixed] for a in fixed])
    gram_inv = np.linalg.pinv(gram)
    basis: list[np.ndarray] = []
    for i in range(space.dim + 1):
        w = space.basis_vector(i)
        # remove the span of ``fixed`` (possibly non-orthogonal, possibly null)
        coeff = gram_inv @ np.array([np.sum(w * f * sig) for f in fixed])
        w = w - sum(c * f for c, f in zip(coeff, fixed))
        for b in basis:
            w = w - np.sum(w * b * sig) * b
        nrm = np.sum(w * w * sig)
        if nrm > 1e-10:
            basis.append(w / np.sqrt(nrm))
        if len(basis) == space.dim + 1 - np.linalg.matrix_rank(gram, tol=1e-12):
            break
    return np.array(basis)
