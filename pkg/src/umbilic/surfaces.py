"""Parametrized hypersurfaces consumed by the shape-operator oracles.

A flat sampler maps parameters u (..., n) to points of a flat ambient
R^m with diagonal metric ``signature``; the hypersurface may additionally lie
on the model quadric selected by ``quadric_mask``.  A chart sampler maps u to
coordinates of a Riemannian chart and supplies the metric there.  Each
sampler also provides a reference normal for the orientation and, when
known, the exact umbilical value.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.stats import qmc

from . import spaceform as sf
from .errors import DomainError
from .families import SPHERE_KINDS, FamilyKind, FamilySpec, eval_family, lambda_of
from .graph import graph_arrays, product_signature
from .profile import EndKind, Profile
from .spaceform import SpaceForm

SEAM_EXCLUSION = 1e-3
HORO_WINDOW = 0.75


def _angle_box(k: int, margin_polar: float = 0.3, margin_az: float = 0.1):
    lo = [margin_polar] * (k - 1) + [margin_az]
    hi = [math.pi - margin_polar] * (k - 1) + [2 * math.pi - margin_az]
    return np.array(lo[:k]), np.array(hi[:k])


class Sampler:
    """Shared grid logic: ``param_box`` is the interior box samples are drawn from."""

    n: int
    param_lo: np.ndarray
    param_hi: np.ndarray

    def param_grid(self, count: int) -> np.ndarray:
        """``count`` deterministic low-discrepancy parameters inside the box."""
        if count < 1:
            raise DomainError("need at least one sample")
        if self.n == 1:
            unit = (np.arange(count)[:, None] + 0.5) / count
        else:
            unit = qmc.Halton(d=self.n, scramble=False).random(count + 1)[1:]
        return self.param_lo + unit * (self.param_hi - self.param_lo)

    def analytic(self, u) -> np.ndarray | None:
        return None

    def near_seam(self, u) -> np.ndarray:
        return np.zeros(np.shape(u)[:-1], dtype=bool)


# flat samplers -----------------------------------------------------------------

class FlatSampler(Sampler):
    signature: np.ndarray
    quadric_mask: np.ndarray
    has_height: bool = False

    def points(self, u) -> np.ndarray:
        raise NotImplementedError

    def reference_normal(self, u) -> np.ndarray:
        return np.zeros(np.shape(u)[:-1] + (len(self.signature),))


def _unique_rows(*cols):
    """Unique rows of stacked 1-d columns and the inverse map."""
    stacked = np.stack([np.ravel(c) for c in cols], axis=-1)
    uniq, inv = np.unique(stacked, axis=0, return_inverse=True)
    return uniq, inv.reshape(np.shape(cols[0]))


class GraphSurface(FlatSampler):
    """The (f_s, phi)-graph in Q^n x R with parameters (q, chart).

    q is the regularizing parameter of the profile, so the graph stays
    smooth in u up to a seam where phi' blows up.  ``q_window`` restricts q to
    a fraction of its range and ``chart_fraction`` shrinks flat chart boxes.
    """

    has_height = True

    def __init__(self, family: FamilySpec, profile: Profile, q_window=None,
                 chart_fraction: float = 0.8):
        if not family.is_geometric:
            raise DomainError("custom lambda families have no embedding to sample")
        self.family = family
        self.profile = profile
        self.n = family.n
        self.signature = product_signature(family)
        self.quadric_mask = np.append(np.ones(family.n + 1), 0.0)
        q_lo, q_hi = profile.q_interval
        if q_window is None:
            q_window = self._default_window()
        a, b = q_window
        span = q_hi - q_lo
        chart_lo, chart_hi = self._chart_box(chart_fraction)
        self.param_lo = np.concatenate([[q_lo + a * span], chart_lo])
        self.param_hi = np.concatenate([[q_lo + b * span], chart_hi])

    def _default_window(self):
        p = self.profile
        if self.family.kind is FamilyKind.HOROSPHERE:
            # model coordinates grow like c exp(s) while chart tangents shrink
            # like exp(-s); past s - s_min ~ 0.75 rounding beats the O(h^2) error
            q_hi = math.sqrt(p.s_cut - p.s_min)
            return (0.02, min(1.0, math.sqrt(HORO_WINDOW) / q_hi))
        if p._rho.end_pole:
            lo, hi = p.q_interval
            return (0.05, (1.4 - lo) / (hi - lo))
        if p._rho.start_singular:
            return (0.02, 0.98)
        return (0.05, 0.95)

    def _chart_box(self, fraction):
        k = self.family.chart_dim
        if self.family.kind in SPHERE_KINDS:
            return _angle_box(k)
        L = fraction * self.family.box_half_width
        return np.full(k, -L), np.full(k, L)

    def _arrays(self, u):
        u = np.asarray(u, dtype=float)
        q = u[..., 0]
        lo, hi = self.profile.q_interval
        if np.any(q < lo) or np.any(q > hi):
            raise DomainError(f"q outside the profile range [{lo}, {hi}]")
        uniq, inv = _unique_rows(q)
        s, ds, de = self.profile.s_from_q(uniq[:, 0])
        return s[inv], ds[inv], de[inv]

    def points(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        s, ds, de = self._arrays(u)
        return graph_arrays(self.family, self.profile, s, u[..., 1:], ds, de).position

    def reference_normal(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        s, ds, de = self._arrays(u)
        return graph_arrays(self.family, self.profile, s, u[..., 1:], ds, de).normal

    def analytic(self, u) -> np.ndarray:
        s, _, _ = self._arrays(u)
        return self.profile.umbilical_value(s)

    def theta(self, u) -> np.ndarray:
        s, ds, de = self._arrays(u)
        return self.profile.theta(s, ds, de)

    def near_seam(self, u) -> np.ndarray:
        s, ds, de = self._arrays(u)
        return self.profile.one_minus_rho(s, ds, de) < SEAM_EXCLUSION


class PerturbedSurface(FlatSampler):
    """Graph with its height shifted by ``amplitude * sin(first chart coordinate)``."""

    has_height = True

    def __init__(self, base: GraphSurface, amplitude: float = 0.01):
        self.base = base
        self.amplitude = float(amplitude)
        self.n = base.n
        self.signature = base.signature
        self.quadric_mask = base.quadric_mask
        self.param_lo, self.param_hi = base.param_lo, base.param_hi

    def points(self, u):
        u = np.asarray(u, dtype=float)
        p = self.base.points(u)
        p[..., -1] += self.amplitude * np.sin(u[..., 1])
        return p

    def reference_normal(self, u):
        return self.base.reference_normal(u)

    def analytic(self, u):
        return self.base.analytic(u)

    def near_seam(self, u):
        return self.base.near_seam(u)


class LeafSurface(FlatSampler):
    """A single leaf f_s inside Q^n (no height), oriented by eta_s."""

    def __init__(self, family: FamilySpec, s: float, chart_fraction: float = 0.8):
        self.family = family
        self.s = float(s)
        self.n = family.chart_dim
        self.signature = family.space.signature
        self.quadric_mask = np.ones(family.n + 1)
        if family.kind in SPHERE_KINDS:
            self.param_lo, self.param_hi = _angle_box(self.n)
        else:
            L = chart_fraction * family.box_half_width
            self.param_lo, self.param_hi = np.full(self.n, -L), np.full(self.n, L)

    def points(self, u):
        return eval_family(self.family, self.s, u).point

    def reference_normal(self, u):
        return eval_family(self.family, self.s, u).normal

    def analytic(self, u):
        return np.broadcast_to(lambda_of(self.family, self.s), np.shape(u)[:-1])


class CylinderSurface(FlatSampler):
    """The vertical cylinder f_s x R with parameters (chart, t)."""

    has_height = True

    def __init__(self, family: FamilySpec, s: float, height: float = 1.0,
                 chart_fraction: float = 0.8):
        self.leaf = LeafSurface(family, s, chart_fraction)
        self.family = family
        self.n = family.n
        self.signature = product_signature(family)
        self.quadric_mask = np.append(np.ones(family.n + 1), 0.0)
        self.param_lo = np.append(self.leaf.param_lo, -height)
        self.param_hi = np.append(self.leaf.param_hi, height)

    def points(self, u):
        u = np.asarray(u, dtype=float)
        return np.concatenate([self.leaf.points(u[..., :-1]), u[..., -1:]], axis=-1)

    def reference_normal(self, u):
        u = np.asarray(u, dtype=float)
        eta = self.leaf.reference_normal(u[..., :-1])
        return np.concatenate([eta, np.zeros(eta.shape[:-1] + (1,))], axis=-1)

    def analytic(self, u):
        """Zero over a totally geodesic leaf; otherwise the cylinder is not umbilical."""
        if lambda_of(self.family, self.leaf.s) != 0:
            return None
        return np.zeros(np.shape(u)[:-1])

    def theta(self, u):
        return np.zeros(np.shape(u)[:-1])


class HorizontalSlice(FlatSampler):
    """The slice Q^n x {height}, parametrized through the ball chart."""

    has_height = True

    def __init__(self, space: SpaceForm, height: float = 0.0, radius: float = 0.5):
        self.space = space
        self.height = float(height)
        self.n = space.dim
        self.signature = np.append(space.signature, 1.0)
        self.quadric_mask = np.append(np.ones(space.dim + 1), 0.0)
        self.chart = BallChart(space)
        r = radius / math.sqrt(space.dim)
        self.param_lo, self.param_hi = np.full(self.n, -r), np.full(self.n, r)

    def points(self, u):
        x = self.chart.from_ball(u)
        return np.concatenate([x, np.full(x.shape[:-1] + (1,), self.height)], axis=-1)

    def reference_normal(self, u):
        out = np.zeros(np.shape(u)[:-1] + (self.space.dim + 2,))
        out[..., -1] = 1.0
        return out

    def analytic(self, u):
        return np.zeros(np.shape(u)[:-1])

    def theta(self, u):
        return np.ones(np.shape(u)[:-1])


# charts ------------------------------------------------------------------------

class BallChart:
    """Stereographic (eps = 1) or Poincare ball (eps = -1) coordinates about ``center``.

    y_i = <x, E_i> / (1 + eps <x, o>), with metric 4 / (1 + eps |y|^2)^2 times
    the Euclidean one.
    """

    def __init__(self, space: SpaceForm, center=None):
        self.space = space
        self.center = space.origin() if center is None else sf.normalize(space, center)
        self.frame = sf.orthonormal_complement(space, [self.center])

    def _den(self, x):
        return 1.0 + self.space.epsilon * sf.model_inner(self.space, x, self.center)

    def to_ball(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        num = (x * self.space.signature) @ self.frame.T
        return num / self._den(x)[..., None]

    def from_ball(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        eps = self.space.epsilon
        r2 = np.sum(y * y, axis=-1)[..., None]
        if eps == -1 and np.any(r2 >= 1.0):
            raise DomainError("Poincare ball coordinates must satisfy |y| < 1")
        den = 1.0 + eps * r2
        return ((1.0 - eps * r2) / den) * self.center + (2.0 / den) * (y @ self.frame)

    def push_forward(self, x, v) -> np.ndarray:
        """Ball-chart components of the model tangent vector ``v`` at ``x``."""
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        sig = self.space.signature
        den = self._den(x)[..., None]
        dv = self.space.epsilon * sf.model_inner(self.space, v, self.center)[..., None]
        return ((v * sig) @ self.frame.T) / den - ((x * sig) @ self.frame.T) * dv / den ** 2

    def conformal_factor(self, y) -> np.ndarray:
        """Squared scale 4 / (1 + eps |y|^2)^2 of the model metric in the chart."""
        r2 = np.sum(np.asarray(y) ** 2, axis=-1)
        return 4.0 / (1.0 + self.space.epsilon * r2) ** 2


class ChartSampler(Sampler):
    """Hypersurface of a warped product given in (t, y) chart coordinates."""

    def coords(self, u) -> np.ndarray:
        raise NotImplementedError

    def metric(self, x) -> np.ndarray:
        raise NotImplementedError

    def reference_normal(self, u) -> np.ndarray:
        raise NotImplementedError


class WarpedMetric:
    """dt^2 + omega(t)^2 g_Q written in the ball chart of Q^n."""

    def __init__(self, warp, chart: BallChart):
        self.warp = warp
        self.chart = chart

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        m = x.shape[-1]
        t = x[..., 0]
        scale = self.warp.omega(t) ** 2 * self.chart.conformal_factor(x[..., 1:])
        g = np.zeros(x.shape[:-1] + (m, m))
        g[..., 0, 0] = 1.0
        idx = np.arange(1, m)
        g[..., idx, idx] = scale[..., None]
        return g


class VerticalLeaf(ChartSampler):
    """The slice {t0} x Q^n of the warped product, oriented by -d/dt."""

    def __init__(self, warp, space: SpaceForm, t0: float, radius: float = 0.5):
        self.warp = warp
        self.t0 = float(t0)
        self.n = space.dim
        self.chart = BallChart(space)
        self.metric_fn = WarpedMetric(warp, self.chart)
        r = radius / math.sqrt(space.dim)
        self.param_lo, self.param_hi = np.full(self.n, -r), np.full(self.n, r)

    def coords(self, u):
        u = np.asarray(u, dtype=float)
        return np.concatenate([np.full(u.shape[:-1] + (1,), self.t0), u], axis=-1)

    def metric(self, x):
        return self.metric_fn(x)

    def reference_normal(self, u):
        out = np.zeros(np.shape(u)[:-1] + (self.n + 1,))
        out[..., 0] = -1.0
        return out

    def analytic(self, u):
        w = self.warp.omega(self.t0)
        return np.full(np.shape(u)[:-1], self.warp.domega(self.t0) / w)


class WarpedGraphSurface(ChartSampler):
    """A graph piece moved into the warped product by (p, u) -> (F^{-1}(u), p).

    ``sigma`` and ``shift`` give the height map u = sigma * phi + shift of the
    assembled piece in the product Q^n x J.
    """

    def __init__(self, graph: GraphSurface, warp, sigma: float = 1.0, shift: float = 0.0):
        self.graph = graph
        self.warp = warp
        self.sigma = float(sigma)
        self.shift = float(shift)
        self.n = graph.n
        self.chart = BallChart(graph.family.space)
        self.metric_fn = WarpedMetric(warp, self.chart)
        self.param_lo, self.param_hi = graph.param_lo, graph.param_hi

    def _height(self, t):
        return self.sigma * t + self.shift

    def coords(self, u):
        p = self.graph.points(u)
        t = self.warp.F_inverse_raw(self._height(p[..., -1]))
        y = self.chart.to_ball(p[..., :-1])
        return np.concatenate([t[..., None], y], axis=-1)

    def metric(self, x):
        return self.metric_fn(x)

    def reference_normal(self, u):
        p = self.graph.points(u)
        N = self.graph.reference_normal(u)
        t = self.warp.F_inverse_raw(self._height(p[..., -1]))
        dt = self.sigma * N[..., -1] * self.warp.omega(t)
        dy = self.chart.push_forward(p[..., :-1], N[..., :-1])
        return np.concatenate([dt[..., None], dy], axis=-1)

    def analytic(self, u):
        p = self.graph.points(u)
        t = self.warp.F_inverse_raw(self._height(p[..., -1]))
        b = self.sigma * self.graph.theta(u)
        lam = self.graph.analytic(u)
        return (lam - b * self.warp.domega(t)) / self.warp.omega(t)

    def near_seam(self, u):
        return self.graph.near_seam(u)

    def inside(self, u, margin: float = 0.05):
        """Rows whose height stays at least ``margin`` inside J."""
        p = self.graph.points(u)
        v = self._height(p[..., -1])
        lo, hi = self.warp.J_raw
        return (v > lo + margin) & (v < hi - margin)


__all__ = [
    "FlatSampler", "ChartSampler", "GraphSurface", "PerturbedSurface", "LeafSurface",
    "CylinderSurface", "HorizontalSlice", "BallChart", "WarpedMetric", "VerticalLeaf",
    "WarpedGraphSurface", "EndKind",
]
