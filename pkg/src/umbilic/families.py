"""Isoparametric parallel families of totally umbilical hypersurfaces of Q^n_eps.

Each family is a one-parameter family of leaves ``f_s`` obtained by flowing a
base leaf along its unit normal geodesics, so that ``eta_s = d f_s / ds`` is
the unit normal of the leaf at signed distance ``s``.  The umbilical constant
``lambda(s)`` refers to this normal and to the convention A = -D(normal):

=================  ====================  =========================
family             leaves                lambda(s)
=================  ====================  =========================
sphere (S^n)       geodesic spheres      -cot s
sphere (H^n)       geodesic spheres      -coth s
horosphere         parallel horospheres  1
equidistant        equidistant leaves    -tanh s
custom             (curvature only)      monotone cubic of a table
=================  ====================  =========================
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import spaceform as sf
from .errors import DomainError
from .spaceform import SpaceForm


class FamilyKind(str, enum.Enum):
    SPHERE_SPHERICAL = "sphere_spherical"
    SPHERE_HYPERBOLIC = "sphere_hyperbolic"
    HOROSPHERE = "horosphere"
    EQUIDISTANT = "equidistant"
    CUSTOM_LAMBDA = "custom_lambda"


SPHERE_KINDS = (FamilyKind.SPHERE_SPHERICAL, FamilyKind.SPHERE_HYPERBOLIC)
FLAT_CHART_KINDS = (FamilyKind.HOROSPHERE, FamilyKind.EQUIDISTANT)


@dataclass(frozen=True, eq=False)
class FamilySpec:
    """A parallel family together with the anchor data that places it in the model.

    ``anchor`` holds ``(center,)`` for spheres, ``(ideal, base)`` for
    horospheres (null ``ideal`` with <base, ideal> = -1) and ``(normal, base)``
    for equidistants (unit spacelike ``normal`` orthogonal to ``base``).
    ``frame`` is an orthonormal basis of the chart directions: n vectors for
    spheres, n - 1 for the flat-chart families.
    """

    kind: FamilyKind
    space: SpaceForm
    anchor: tuple = ()
    frame: np.ndarray | None = field(default=None, repr=False)
    s_domain: tuple[float, float] = (-math.inf, math.inf)
    lambda_table: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)
    box_half_width: float = 3.0

    @property
    def n(self) -> int:
        return self.space.dim

    @property
    def chart_dim(self) -> int:
        return self.space.dim - 1

    @property
    def is_geometric(self) -> bool:
        return self.kind is not FamilyKind.CUSTOM_LAMBDA

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))
        if self.kind is FamilyKind.SPHERE_SPHERICAL and self.space.epsilon != 1:
            raise DomainError("geodesic spheres of S^n need epsilon = 1")
        if self.kind in (FamilyKind.SPHERE_HYPERBOLIC, *FLAT_CHART_KINDS) and self.space.epsilon != -1:
            raise DomainError(f"{self.kind.value} family needs epsilon = -1")
        if self.kind is FamilyKind.SPHERE_SPHERICAL:
            lo, hi = self.s_domain
            if lo < 0 or hi > math.pi / 2:
                raise DomainError("sphere family domain must lie in (0, pi/2)")
        if self.kind is FamilyKind.HOROSPHERE:
            ideal, base = self.anchor
            if abs(sf.model_inner(self.space, ideal, ideal)) > 1e-10 or not np.any(ideal):
                raise DomainError("horosphere anchor must be a nonzero null vector")
            if abs(sf.model_inner(self.space, base, ideal) + 1.0) > 1e-10:
                raise DomainError("horosphere base point must satisfy <base, ideal> = -1")
        if self.kind is FamilyKind.EQUIDISTANT:
            normal, base = self.anchor
            if abs(sf.model_inner(self.space, normal, normal) - 1.0) > 1e-10:
                raise DomainError("equidistant anchor must be a unit spacelike vector")
            if abs(sf.model_inner(self.space, normal, base)) > 1e-10:
                raise DomainError("equidistant base point must lie on the totally geodesic leaf")
        if self.kind is FamilyKind.CUSTOM_LAMBDA:
            if self.lambda_table is None:
                raise DomainError("custom family needs a lambda table")
            s, lam = self.lambda_table
            if len(s) < 2 or np.any(np.diff(s) <= 0):
                raise DomainError("lambda table needs at least two strictly increasing s values")
            object.__setattr__(self, "_interp", PchipInterpolator(s, lam, extrapolate=False))

    # chart maps -----------------------------------------------------------

    def chart_direction(self, chart) -> np.ndarray:
        """Unit vector of the sphere leaf direction from hyperspherical angles."""
        chart = np.asarray(chart, dtype=float)
        unit = polar_unit_vector(chart)
        return unit @ self.frame

    def base_point(self, chart) -> np.ndarray:
        """Point of the base leaf (s = 0) for the flat-chart families."""
        chart = np.asarray(chart, dtype=float)
        if self.kind is FamilyKind.HOROSPHERE:
            ideal, base = self.anchor
            r2 = np.sum(chart * chart, axis=-1)[..., None]
            return base + chart @ self.frame + 0.5 * r2 * ideal
        if self.kind is FamilyKind.EQUIDISTANT:
            _, base = self.anchor
            r2 = np.sum(chart * chart, axis=-1)[..., None]
            return np.sqrt(1.0 + r2) * base + chart @ self.frame
        raise DomainError(f"{self.kind.value} has no flat base chart")

    def center(self) -> np.ndarray:
        return self.anchor[-1] if self.kind in FLAT_CHART_KINDS else self.anchor[0]


def polar_unit_vector(angles) -> np.ndarray:
    """Hyperspherical coordinates (theta_1..theta_{k}) -> unit vector of R^{k+1}.

    u_1 = cos t1, u_2 = sin t1 cos t2, ..., u_{k+1} = sin t1 ... sin tk.
    """
    angles = np.asarray(angles, dtype=float)
    k = angles.shape[-1]
    out = np.empty(angles.shape[:-1] + (k + 1,))
    run = np.ones(angles.shape[:-1])
    for i in range(k):
        out[..., i] = run * np.cos(angles[..., i])
        run = run * np.sin(angles[..., i])
    out[..., k] = run
    return out


# constructors -------------------------------------------------------------

def sphere_family(space: SpaceForm, center=None) -> FamilySpec:
    """Concentric geodesic spheres about ``center`` (default e_0)."""
    o = space.origin() if center is None else sf.normalize(space, center)
    frame = sf.orthonormal_complement(space, [o])
    if space.epsilon == 1:
        return FamilySpec(FamilyKind.SPHERE_SPHERICAL, space, (o,), frame, (0.0, math.pi / 2))
    return FamilySpec(FamilyKind.SPHERE_HYPERBOLIC, space, (o,), frame, (0.0, math.inf))


def horosphere_family(space: SpaceForm, ideal=None, base=None, box_half_width=3.0) -> FamilySpec:
    """Parallel horospheres with ideal point ``ideal`` (default e_0 + e_n)."""
    if space.epsilon != -1:
        raise DomainError("horospheres live in H^n")
    base = space.origin() if base is None else np.asarray(base, dtype=float)
    if ideal is None:
        ideal = space.origin() + space.basis_vector(space.dim)
    ideal = np.asarray(ideal, dtype=float)
    ideal = ideal / -sf.model_inner(space, base, ideal)
    frame = sf.orthonormal_complement(space, [base, ideal])
    return FamilySpec(FamilyKind.HOROSPHERE, space, (ideal, base), frame,
                      (-math.inf, math.inf), box_half_width=box_half_width)


def equidistant_family(space: SpaceForm, normal=None, base=None, box_half_width=3.0) -> FamilySpec:
    """Leaves at signed distance s from the totally geodesic hyperplane normal to ``normal``."""
    if space.epsilon != -1:
        raise DomainError("equidistant hypersurfaces live in H^n")
    base = space.origin() if base is None else np.asarray(base, dtype=float)
    normal = space.basis_vector(space.dim) if normal is None else np.asarray(normal, dtype=float)
    frame = sf.orthonormal_complement(space, [base, normal])
    return FamilySpec(FamilyKind.EQUIDISTANT, space, (normal, base), frame,
                      (-math.inf, math.inf), box_half_width=box_half_width)


def custom_family(space: SpaceForm, s_values, lambda_values) -> FamilySpec:
    s_values = np.asarray(s_values, dtype=float)
    lambda_values = np.asarray(lambda_values, dtype=float)
    return FamilySpec(FamilyKind.CUSTOM_LAMBDA, space, (), None,
                      (float(s_values[0]), float(s_values[-1])), (s_values, lambda_values))


def load_lambda_table(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column ``s,lambda`` CSV with a header row."""
    rows = []
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip().lower() for h in next(reader)]
        if header[:2] != ["s", "lambda"]:
            raise DomainError(f"lambda table header must be 's,lambda', got {header}")
        for row in reader:
            if row:
                rows.append((float(row[0]), float(row[1])))
    arr = np.array(rows, dtype=float)
    if arr.ndim != 2 or len(arr) < 2:
        raise DomainError("lambda table needs at least two rows")
    if np.any(np.diff(arr[:, 0]) <= 0):
        raise DomainError("lambda table s column must be strictly increasing")
    return arr[:, 0], arr[:, 1]


def make_family(space: SpaceForm, name: str) -> FamilySpec:
    """Built-in family by short name: ``sphere``, ``horosphere`` or ``equidistant``."""
    name = name.lower()
    if name == "sphere":
        return sphere_family(space)
    if name == "horosphere":
        return horosphere_family(space)
    if name == "equidistant":
        return equidistant_family(space)
    raise DomainError(f"unknown family {name!r}")


# evaluation ---------------------------------------------------------------

@dataclass(frozen=True)
class FamilyPointEval:
    point: np.ndarray
    normal: np.ndarray
    lam: np.ndarray


def _check_s(spec: FamilySpec, s, closed: bool):
    s = np.asarray(s, dtype=float)
    lo, hi = spec.s_domain
    if closed:
        bad = (s < lo) | (s > hi)
    else:
        bad = (s <= lo) | (s >= hi)
    if np.any(bad) or np.any(~np.isfinite(s)):
        raise DomainError(f"s outside the domain {spec.s_domain} of the {spec.kind.value} family")
    return s


def lambda_of(spec: FamilySpec, s) -> np.ndarray:
    """Umbilical constant of the leaf at parameter ``s``."""
    k = spec.kind
    if k is FamilyKind.CUSTOM_LAMBDA:
        s = np.asarray(s, dtype=float)
        lo, hi = spec.s_domain
        if np.any((s < lo) | (s > hi)):
            raise DomainError(f"s outside lambda table range [{lo}, {hi}]")
        return np.asarray(spec._interp(s), dtype=float)
    s = _check_s(spec, s, closed=k in FLAT_CHART_KINDS)
    if k is FamilyKind.SPHERE_SPHERICAL:
        return -1.0 / np.tan(s)
    if k is FamilyKind.SPHERE_HYPERBOLIC:
        return -1.0 / np.tanh(s)
    if k is FamilyKind.HOROSPHERE:
        return np.ones_like(s)
    return -np.tanh(s)


def principal_curvatures_of_leaf(spec: FamilySpec, s) -> np.ndarray:
    lam = np.asarray(lambda_of(spec, s))
    return np.repeat(lam[..., None], spec.chart_dim, axis=-1)


def eval_family(spec: FamilySpec, s, chart) -> FamilyPointEval:
    """Closed-form leaf point f_s(chart), its unit normal d f_s/ds and lambda(s).

    Spheres accept the closed interval of their domain: at s = 0 every chart
    direction collapses to the center, and the returned normal is the chart
    direction itself (the limit of eta_s along that ray).
    """
    if not spec.is_geometric:
        raise DomainError("custom lambda families carry no embedding")
    s = _check_s(spec, s, closed=True)
    chart = np.asarray(chart, dtype=float)
    if chart.shape[-1] != spec.chart_dim:
        raise DomainError(f"chart must have {spec.chart_dim} coordinates")
    space = spec.space
    ss = s[..., None]
    k = spec.kind
    if k in SPHERE_KINDS:
        o = spec.anchor[0]
        u = spec.chart_direction(chart)
        if k is FamilyKind.SPHERE_SPHERICAL:
            point = np.cos(ss) * o + np.sin(ss) * u
            normal = -np.sin(ss) * o + np.cos(ss) * u
            lam = -np.cos(s) / np.where(s == 0, np.nan, np.sin(s))
        else:
            point = np.cosh(ss) * o + np.sinh(ss) * u
            normal = np.sinh(ss) * o + np.cosh(ss) * u
            lam = -np.cosh(s) / np.where(s == 0, np.nan, np.sinh(s))
    elif k is FamilyKind.HOROSPHERE:
        ideal, _ = spec.anchor
        p = spec.base_point(chart)
        point = np.exp(-ss) * p + np.sinh(ss) * ideal
        normal = -np.exp(-ss) * p + np.cosh(ss) * ideal
        lam = np.ones(np.broadcast(s, chart[..., 0]).shape)
    else:
        e, _ = spec.anchor
        p = spec.base_point(chart)
        point = np.cosh(ss) * p + np.sinh(ss) * e
        normal = np.sinh(ss) * p + np.cosh(ss) * e
        lam = -np.tanh(s)
    point = sf.normalize(space, point)
    return FamilyPointEval(point, normal, np.broadcast_to(lam, point.shape[:-1]))


def level_value(spec: FamilySpec, point) -> np.ndarray:
    """The level function whose level sets are the leaves.

    Horospheres: <x, ideal> = -exp(-s).  Equidistants: <x, normal> = sinh s.
    Spheres: distance to the center.
    """
    k = spec.kind
    if k in SPHERE_KINDS:
        return sf.distance(spec.space, point, spec.anchor[0])
    return sf.model_inner(spec.space, point, spec.anchor[0])
