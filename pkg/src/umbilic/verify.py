"""Finite-difference shape-operator oracles and umbilicity reports.

The flat oracle works in the linear model of Q^n_eps x R: the unit normal is
the kernel vector orthogonal to the coordinate tangents and to the radial
direction of the quadric, and h_ab = -<D_a N, x_b> with D the flat
derivative.  Because the Levi-Civita connection of the quadric is the
tangential part of D, this is the second fundamental form for A = -nabla N.

The chart oracle works in coordinates of a Riemannian chart and takes the
Christoffel symbols from central differences of the metric components.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, OracleError
from .kernels import chart_shape_operator, flat_shape_operator
from .surfaces import ChartSampler, FlatSampler

DEFAULT_STEP = 1e-3
COND_LIMIT = 1e10
# metric derivatives use a finer central stencil; the conformal factor is steep
# near the rim of the ball chart
METRIC_STEP_RATIO = 1e-2


@dataclass(frozen=True)
class OracleResult:
    eigenvalues: np.ndarray   # (B, n)
    shape_operator: np.ndarray  # (B, n, n), A in the coordinate frame
    normal: np.ndarray        # (B, m)
    tangents: np.ndarray      # (B, n, m)
    cond: np.ndarray          # (B,)


def _stencil(params, h):
    """Nested stencil parameters of shape (B, C, C, n), C = 1 + 2n."""
    params = np.atleast_2d(np.asarray(params, dtype=float))
    n = params.shape[-1]
    off = np.zeros((1 + 2 * n, n))
    for a in range(n):
        off[1 + 2 * a, a] = h
        off[2 + 2 * a, a] = -h
    centers = params[:, None, :] + off[None]
    return centers[:, :, None, :] + off[None, None]


def _check(res: OracleResult) -> OracleResult:
    if not np.all(np.isfinite(res.eigenvalues)):
        raise OracleError("non-finite shape operator")
    worst = float(np.max(res.cond))
    if worst > COND_LIMIT:
        raise OracleError(f"degenerate first fundamental form (condition number {worst:.3e})")
    return res


def _eval(fn, *args):
    try:
        return fn(*args)
    except DomainError as exc:
        raise OracleError(f"stencil left the parameter domain: {exc}") from exc
    except np.linalg.LinAlgError as exc:
        raise OracleError(f"degenerate first fundamental form: {exc}") from exc


def shape_operator_flat(surface: FlatSampler, params, h: float = DEFAULT_STEP,
                        backend: str | None = None) -> OracleResult:
    """Shape operator of a flat sampler at each row of ``params``."""
    if h <= 0:
        raise DomainError("step must be positive")
    U = _stencil(params, h)
    P = _eval(surface.points, U)
    ref = _eval(surface.reference_normal, U[:, 0, 0])
    out = _eval(flat_shape_operator, P, surface.signature, surface.quadric_mask, ref, h, backend)
    return _check(OracleResult(*out))


def _metric_gradient(metric, x, h):
    """d_k g_ij at the rows of ``x`` by central differences, shape (B, m, m, m)."""
    B, m = x.shape
    off = np.eye(m) * h
    plus = metric(x[:, None, :] + off[None])
    minus = metric(x[:, None, :] - off[None])
    return (plus - minus) / (2.0 * h)


def shape_operator_chart(surface: ChartSampler, params, h: float = DEFAULT_STEP,
                         backend: str | None = None) -> OracleResult:
    """Shape operator of a chart sampler; tangents and normal are in chart components."""
    if h <= 0:
        raise DomainError("step must be positive")
    U = _stencil(params, h)
    P = _eval(surface.coords, U)
    G = _eval(surface.metric, P[:, :, 0])
    if not np.all(np.isfinite(G)) or np.any(np.linalg.eigvalsh(G)[..., 0] <= 0):
        raise OracleError("metric is degenerate at a stencil center")
    dG = _eval(_metric_gradient, surface.metric, P[:, 0, 0], h * METRIC_STEP_RATIO)
    ref = _eval(surface.reference_normal, U[:, 0, 0])
    out = _eval(chart_shape_operator, P, G, dG, ref, h, backend)
    return _check(OracleResult(*out))


@dataclass
class UmbilicReport:
    oracle: str
    h: float
    tol: float
    samples: list = field(repr=False)
    max_spread: float
    analytic_comparison: float | None
    passed: bool
    excluded_near_seam: int
    theta_range: float | None = None
    max_abs_curvature: float = 0.0

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    def summary(self) -> dict:
        return {
            "oracle": self.oracle,
            "h": self.h,
            "tol": self.tol,
            "n_samples": self.n_samples,
            "max_spread": self.max_spread,
            "analytic_comparison": self.analytic_comparison,
            "passed": self.passed,
            "excluded_near_seam": self.excluded_near_seam,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def umbilicity_report(surface, params, h: float = DEFAULT_STEP, tol: float = 1e-4,
                      oracle: str | None = None, backend: str | None = None) -> UmbilicReport:
    """Run the oracle over ``params`` and fold the spreads into a pass/fail report.

    Samples with 1 - rho < 1e-3 are excluded from the statistics and counted.
    The analytic comparison is the largest |mean eigenvalue - exact value|
    over included samples, when the sampler knows the exact value.
    """
    params = np.atleast_2d(np.asarray(params, dtype=float))
    if params.shape[0] == 0:
        raise DomainError("sample grid is empty")
    if oracle is None:
        oracle = "chart" if isinstance(surface, ChartSampler) else "flat"
    keep = ~np.asarray(surface.near_seam(params), dtype=bool)
    excluded = int(np.count_nonzero(~keep))
    params = params[keep]
    if params.shape[0] == 0:
        raise DomainError("every sample lies next to a seam")
    if oracle == "flat":
        res = shape_operator_flat(surface, params, h, backend)
    elif oracle == "chart":
        res = shape_operator_chart(surface, params, h, backend)
    else:
        raise DomainError(f"unknown oracle {oracle!r}")
    eig = res.eigenvalues
    mean = eig.mean(axis=-1)
    spread = eig[:, -1] - eig[:, 0]
    exact = surface.analytic(params)
    comparison = None
    if exact is not None:
        comparison = float(np.max(np.abs(mean - exact)))
    theta_range = None
    if oracle == "flat" and getattr(surface, "has_height", False):
        theta = res.normal[:, -1]
        theta_range = float(theta.max() - theta.min())
    samples = [
        {"params": params[i].tolist(), "eigenvalues": eig[i].tolist(),
         "mean": float(mean[i]), "spread": float(spread[i])}
        for i in range(len(params))
    ]
    max_spread = float(spread.max())
    passed = max_spread <= tol and (comparison is None or comparison <= tol)
    return UmbilicReport(oracle, float(h), float(tol), samples, max_spread, comparison,
                         bool(passed), excluded, theta_range,
                         float(np.max(np.abs(eig))))


def convergence_ratio(surface, params, h: float = DEFAULT_STEP, backend: str | None = None) -> float:
    """max spread at h divided by max spread at h / 2 (about 4 for second-order stencils)."""
    coarse = umbilicity_report(surface, params, h, math.inf, backend=backend).max_spread
    fine = umbilicity_report(surface, params, 0.5 * h, math.inf, backend=backend).max_spread
    if fine == 0:
        raise OracleError("spread vanished at the finer step; ratio undefined")
    return coarse / fine
