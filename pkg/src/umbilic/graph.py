"""Umbilical (f_s, phi)-graphs in Q^n_eps x R.

The product is realized in the flat space R^{n+2} whose first n + 1
coordinates carry the model inner product of Q^n_eps and whose last
coordinate is the height t.  For the graph X(s, p) = (f_s(p), phi(s)) the
upward unit normal is

    N = -rho eta_s + Theta dt,        Theta = sqrt(1 - rho^2),

and with A = -D N every principal curvature equals -rho lambda = rho'.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .families import FamilySpec, eval_family
from .profile import Profile


@dataclass(frozen=True)
class ProductPoint:
    base: np.ndarray
    height: float

    def as_vector(self) -> np.ndarray:
        return np.append(self.base, self.height)


@dataclass(frozen=True)
class GraphPoint:
    position: ProductPoint
    normal: np.ndarray
    theta: float
    T_field: np.ndarray
    curvatures: np.ndarray
    s: float
    chart: np.ndarray


def product_signature(family: FamilySpec) -> np.ndarray:
    """Diagonal of the flat ambient metric of Q^n_eps x R."""
    return np.append(family.space.signature, 1.0)


@dataclass(frozen=True)
class GraphArrays:
    """Batched graph data; leading axes follow the broadcast of s and chart."""

    position: np.ndarray
    normal: np.ndarray
    theta: np.ndarray
    height: np.ndarray
    umbilic: np.ndarray


def graph_arrays(family: FamilySpec, profile: Profile, s, chart,
                 d_start=None, d_end=None) -> GraphArrays:
    """Positions (x, t), normals and angle function for stacked (s, chart).

    ``d_start`` / ``d_end`` pass s - s_min and s_max - s exactly, which keeps
    phi and Theta accurate next to a seam.
    """
    if profile.family is not family:
        raise DomainError("profile was built for a different family")
    s = np.asarray(s, dtype=float)
    chart = np.asarray(chart, dtype=float)
    if chart.shape[-1] != family.chart_dim:
        raise DomainError(f"chart must have {family.chart_dim} coordinates")
    fe = eval_family(family, s, chart)
    shape = fe.point.shape[:-1]
    s_b = np.broadcast_to(s, shape)
    if d_start is not None:
        d_start = np.broadcast_to(d_start, shape)
    if d_end is not None:
        d_end = np.broadcast_to(d_end, shape)
    rho = profile.rho(s_b)[..., None]
    theta = profile.theta(s_b, d_start, d_end)
    height = _phi_unique(profile, s_b, d_start, d_end)
    position = np.concatenate([fe.point, height[..., None]], axis=-1)
    normal = np.concatenate([-rho * fe.normal, theta[..., None]], axis=-1)
    return GraphArrays(position, normal, theta, height, profile.umbilical_value(s_b))


def _phi_unique(profile: Profile, s, d_start, d_end):
    """phi on stacked s, integrating each distinct abscissa once."""
    cols = [s.ravel()]
    cols += [np.ravel(d) for d in (d_start, d_end) if d is not None]
    uniq, inv = np.unique(np.stack(cols, axis=-1), axis=0, return_inverse=True)
    k = 1
    ds = de = None
    if d_start is not None:
        ds, k = uniq[:, k], k + 1
    if d_end is not None:
        de = uniq[:, k]
    return profile.phi(uniq[:, 0], ds, de)[inv.ravel()].reshape(s.shape)


def analytic_curvatures(family: FamilySpec, profile: Profile, s) -> np.ndarray:
    """Principal curvatures of the graph at ``s``: n copies of rho'(s) = -lambda(s) rho(s)."""
    s = np.asarray(s, dtype=float)
    lo, hi = profile.s_range
    if np.any(s < lo) or np.any(s >= hi):
        raise DomainError(f"s outside [{lo}, {hi})")
    k = profile.umbilical_value(s)
    return np.repeat(np.asarray(k)[..., None], family.n, axis=-1)


def eval_graph(family: FamilySpec, profile: Profile, s: float, chart) -> GraphPoint:
    s = float(s)
    lo, hi = profile.s_range
    if not lo <= s < hi:
        raise DomainError(f"s = {s} outside [{lo}, {hi})")
    chart = np.asarray(chart, dtype=float)
    g = graph_arrays(family, profile, s, chart)
    dt = np.zeros(family.n + 2)
    dt[-1] = 1.0
    T = dt - g.theta * g.normal
    return GraphPoint(
        position=ProductPoint(g.position[:-1].copy(), float(g.height)),
        normal=g.normal,
        theta=float(g.theta),
        T_field=T,
        curvatures=analytic_curvatures(family, profile, s),
        s=s,
        chart=chart,
    )


def t_principal_direction_check(point: GraphPoint, shape_operator, tangents,
                                signature) -> float:
    """||A T - k_n T|| / ||T|| with A and the tangent frame from the numerical oracle.

    ``shape_operator`` is the n x n matrix of A in the coordinate frame
    ``tangents`` (rows).  T is expressed in that frame through the metric.
    """
    T = point.T_field
    sig = np.asarray(signature, dtype=float)
    normT = np.sqrt(max(float(np.sum(T * T * sig)), 0.0))
    if normT < 1e-8:
        raise DomainError("T vanishes at a horizontal point")
    X = np.asarray(tangents)
    g = (X * sig) @ X.T
    coeff = np.linalg.solve(g, (X * sig) @ T)
    residual_coords = np.asarray(shape_operator) @ coeff - point.curvatures[-1] * coeff
    r = residual_coords @ X
    return float(np.sqrt(max(np.sum(r * r * sig), 0.0)) / normT)
