"""Conformal transfer between warped products and Riemannian products.

For I x_omega Q^n_eps with metric dt^2 + omega(t)^2 g_Q, the map
(t, p) -> (p, F(t)) with F' = 1/omega is a conformal diffeomorphism onto
Q^n_eps x J, J = F(I), with conformal factor 1/omega.  Total umbilicity is
conformally invariant, so umbilical hypersurfaces of the product pull back
to umbilical hypersurfaces of the warped product; the umbilical function
becomes (lambda - b omega'(t)) / omega(t), b being the d/du component of the
product normal.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize.elementwise import find_root

from .assemble import AssembledHypersurface, SampleCloud, Topology, sample_assembly
from .errors import DomainError, EmptySlabError
from .quadrature import tanh_sinh

DIVERGENCE_CUTOFF = 1e6
BORDERLINE_RTOL = 1e-9
PLACEMENT_MARGIN = 1.0


class OmegaKind(str, enum.Enum):
    IDENTITY = "t"
    EXP_NEG = "exp-neg"
    CONSTANT = "const"
    COSH = "cosh"
    TABLE = "table"


@dataclass(frozen=True, eq=False)
class WarpSpec:
    """Warping function omega on the open interval I together with F and J = F(I).

    ``k`` and ``half_length`` describe Constant(k) on (-L, L); ``table`` holds
    (t, omega) samples for tabulated warps.  ``offset`` is the value of F
    mapped to the center of J.
    """

    kind: OmegaKind
    k: float = 1.0
    half_length: float = math.inf
    table: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", OmegaKind(self.kind))
        if self.kind is OmegaKind.CONSTANT:
            if not self.k > 0:
                raise DomainError(f"constant warp needs k > 0, got {self.k}")
            if not self.half_length > 0:
                raise DomainError("constant warp interval must have positive length")
        if self.kind is OmegaKind.TABLE:
            if self.table is None:
                raise DomainError("table warp needs (t, omega) samples")
            t, w = (np.asarray(a, dtype=float) for a in self.table)
            if len(t) < 2 or np.any(np.diff(t) <= 0):
                raise DomainError("omega table needs strictly increasing t")
            if np.any(w <= 0) or not np.all(np.isfinite(w)):
                raise DomainError("omega must be positive on the table")
            interp = PchipInterpolator(t, w, extrapolate=False)
            object.__setattr__(self, "_interp", interp)
            object.__setattr__(self, "_dinterp", interp.derivative())
            # F vanishes at the first node; cumulative integrals per segment
            seg = tanh_sinh(lambda x, a, b: 1.0 / interp(x), t[:-1], t[1:])
            object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum(seg)]))

    # omega ------------------------------------------------------------------

    @property
    def interval_I(self) -> tuple[float, float]:
        kind = self.kind
        if kind is OmegaKind.IDENTITY:
            return (0.0, math.inf)
        if kind is OmegaKind.CONSTANT:
            return (-self.half_length, self.half_length)
        if kind is OmegaKind.TABLE:
            t = self.table[0]
            return (float(t[0]), float(t[-1]))
        return (-math.inf, math.inf)

    def _check_t(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.interval_I
        closed = self.kind is OmegaKind.TABLE
        bad = (t < lo) | (t > hi) if closed else (t <= lo) | (t >= hi)
        if np.any(bad) or np.any(np.isnan(t)):
            raise DomainError(f"t outside I = ({lo}, {hi})")
        return t

    def omega(self, t):
        t = self._check_t(t)
        kind = self.kind
        if kind is OmegaKind.IDENTITY:
            return t.copy()
        if kind is OmegaKind.EXP_NEG:
            return np.exp(-t)
        if kind is OmegaKind.CONSTANT:
            return np.full(t.shape, self.k)
        if kind is OmegaKind.COSH:
            return np.cosh(t)
        return self._interp(t)

    def domega(self, t):
        t = self._check_t(t)
        kind = self.kind
        if kind is OmegaKind.IDENTITY:
            return np.ones(t.shape)
        if kind is OmegaKind.EXP_NEG:
            return -np.exp(-t)
        if kind is OmegaKind.CONSTANT:
            return np.zeros(t.shape)
        if kind is OmegaKind.COSH:
            return np.sinh(t)
        return self._dinterp(t)

    # F and J ----------------------------------------------------------------

    def F_raw(self, t):
        """F(t) before recentering."""
        t = self._check_t(t)
        kind = self.kind
        if kind is OmegaKind.IDENTITY:
            return np.log(t)
        if kind is OmegaKind.EXP_NEG:
            return np.exp(t)
        if kind is OmegaKind.CONSTANT:
            return t / self.k
        if kind is OmegaKind.COSH:
            return np.arctan(np.sinh(t))
        tt = self.table[0]
        i = np.clip(np.searchsorted(tt, t, side="right") - 1, 0, len(tt) - 2)
        part = tanh_sinh(lambda x, a, b: 1.0 / self._interp(x), tt[i], t)
        return self._cum[i] + part

    @property
    def J_raw(self) -> tuple[float, float]:
        kind = self.kind
        if kind is OmegaKind.IDENTITY:
            return (-math.inf, math.inf)
        if kind is OmegaKind.EXP_NEG:
            return (0.0, math.inf)
        if kind is OmegaKind.CONSTANT:
            return (-self.half_length / self.k, self.half_length / self.k)
        if kind is OmegaKind.COSH:
            return (-math.pi / 2, math.pi / 2)
        lo, hi = 0.0, float(self._cum[-1])
        return (lo if abs(lo) < DIVERGENCE_CUTOFF else -math.inf,
                hi if abs(hi) < DIVERGENCE_CUTOFF else math.inf)

    @property
    def delta(self) -> float:
        lo, hi = self.J_raw
        return 0.5 * (hi - lo)

    def F_inverse_raw(self, u):
        u = np.asarray(u, dtype=float)
        lo, hi = self.J_raw
        if np.any(u <= lo) or np.any(u >= hi) or np.any(np.isnan(u)):
            if not (self.kind is OmegaKind.TABLE and np.all((u >= lo) & (u <= hi))):
                raise DomainError(f"u outside F(I) = ({lo}, {hi})")
        kind = self.kind
        if kind is OmegaKind.IDENTITY:
            return np.exp(u)
        if kind is OmegaKind.EXP_NEG:
            return np.log(u)
        if kind is OmegaKind.CONSTANT:
            return u * self.k
        if kind is OmegaKind.COSH:
            return np.arcsinh(np.tan(u))
        t_lo, t_hi = self.interval_I
        flat = np.ravel(u)
        res = find_root(lambda t, target: self.F_raw(t) - target,
                        (np.full(flat.shape, t_lo), np.full(flat.shape, t_hi)),
                        args=(flat,), tolerances=dict(xatol=0.0, xrtol=0.0, fatol=0.0))
        return res.x.reshape(u.shape)


def F_of(spec: WarpSpec, t):
    return spec.F_raw(t)


def F_inverse(spec: WarpSpec, u):
    return spec.F_inverse_raw(u)


def parse_omega(text: str, delta: float | None = None) -> WarpSpec:
    """``t``, ``exp-neg``, ``cosh``, ``const:k`` or ``table:path.csv`` (columns t,omega).

    ``delta`` sets the half-width of J for a constant warp, i.e. L = delta * k.
    """
    text = text.strip().lower()
    if text in ("t", "identity"):
        spec = WarpSpec(OmegaKind.IDENTITY)
    elif text in ("exp-neg", "exp(-t)", "e^-t", "expneg"):
        spec = WarpSpec(OmegaKind.EXP_NEG)
    elif text == "cosh":
        spec = WarpSpec(OmegaKind.COSH)
    elif text.startswith("const"):
        _, _, val = text.partition(":")
        k = float(val) if val else 1.0
        L = math.inf if delta is None else float(delta) * k
        return WarpSpec(OmegaKind.CONSTANT, k=k, half_length=L)
    elif text.startswith("table:"):
        spec = WarpSpec(OmegaKind.TABLE, table=load_omega_table(text[6:]))
    else:
        raise DomainError(f"unknown warp {text!r}")
    if delta is not None:
        raise DomainError("--delta only applies to constant warps")
    return spec


def load_omega_table(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]


# placing a product object inside J ---------------------------------------------

def centered_height_range(h: AssembledHypersurface) -> tuple[float, float]:
    lo, hi = h.height_range
    return (lo - h.center_shift, hi - h.center_shift)


def placement(spec: WarpSpec, h: AssembledHypersurface) -> float:
    """Raw F value assigned to centered height 0.

    Finite J: its midpoint.  J = R: 0.  Half-infinite J: the object is put
    a unit margin away from the finite end.
    """
    lo, hi = spec.J_raw
    c_lo, c_hi = centered_height_range(h)
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi)
    if math.isfinite(lo):
        return lo + PLACEMENT_MARGIN - (c_lo if math.isfinite(c_lo) else 0.0)
    if math.isfinite(hi):
        return hi - PLACEMENT_MARGIN - (c_hi if math.isfinite(c_hi) else 0.0)
    return 0.0


@dataclass(frozen=True)
class WarpedPointSet:
    t: np.ndarray
    base: np.ndarray
    piece: np.ndarray
    s: np.ndarray
    chart: np.ndarray
    offset: float
    kept: int
    dropped: int


def pull_back(spec: WarpSpec, h: AssembledHypersurface, cloud: SampleCloud | None = None,
              **sample_kw) -> WarpedPointSet:
    """Send sampled product points (p, u) to warped points (F^{-1}(u), p).

    Points outside J are clipped; raises EmptySlabError if none remain.
    """
    cloud = cloud or sample_assembly(h, **sample_kw)
    pts, s, chart, _, _, piece = cloud.flat()
    offset = placement(spec, h)
    u = pts[:, -1] - h.center_shift + offset
    lo, hi = spec.J_raw
    keep = (u > lo) & (u < hi) & np.isfinite(u)
    if not np.any(keep):
        raise EmptySlabError("no sampled point lies inside the slab J")
    t = spec.F_inverse_raw(u[keep])
    return WarpedPointSet(t, pts[keep, :-1], piece[keep], s[keep], chart[keep], offset,
                          int(np.count_nonzero(keep)), int(np.count_nonzero(~keep)))


def map_to_product(spec: WarpSpec, h: AssembledHypersurface, warped: WarpedPointSet) -> np.ndarray:
    """Inverse of :func:`pull_back`: rows (p, u) in the product picture."""
    u = spec.F_raw(warped.t) - warped.offset + h.center_shift
    return np.concatenate([warped.base, u[:, None]], axis=-1)


def product_shift(spec: WarpSpec, h: AssembledHypersurface) -> float:
    """Constant added to assembled heights to obtain raw F values."""
    return placement(spec, h) - h.center_shift


# classification ------------------------------------------------------------------

@dataclass(frozen=True)
class WarpClassification:
    topology: Topology
    complete: bool
    borderline: bool
    delta: float
    reaches_lower: bool
    reaches_upper: bool

    def as_dict(self) -> dict:
        return {"topology": self.topology.value, "complete": self.complete,
                "borderline": self.borderline,
                "delta": self.delta if math.isfinite(self.delta) else "inf"}


def classify_warped(spec: WarpSpec, h: AssembledHypersurface) -> WarpClassification:
    """Topology and completeness of the transferred hypersurface.

    The hypersurface leaves every compact set of the warped product exactly
    when it runs into an end of J whose end of I is finite; it is then
    incomplete.  A sphere-like object is cut into an annulus once its
    vertical diameter reaches 2 delta; equality is reported as annulus with
    ``borderline`` set.
    """
    delta = spec.delta
    off = placement(spec, h)
    lo, hi = spec.J_raw
    c_lo, c_hi = centered_height_range(h)
    j_lo, j_hi = lo - off, hi - off
    reaches_lower = c_lo <= j_lo
    reaches_upper = c_hi >= j_hi
    borderline = False
    topo = h.topology
    if topo is Topology.SPHERE:
        diam = h.vertical_diameter
        width = j_hi - j_lo
        tol = BORDERLINE_RTOL * max(1.0, diam)
        if math.isfinite(width) and abs(diam - width) <= tol:
            borderline = True
            reaches_lower = reaches_upper = True
        topo = Topology.ANNULUS if (reaches_lower or reaches_upper) else Topology.SPHERE
    elif topo is Topology.PERIODIC_PLANE:
        topo = Topology.BALL
    I_lo, I_hi = spec.interval_I
    incomplete = (reaches_lower and math.isfinite(I_lo)) or (reaches_upper and math.isfinite(I_hi))
    return WarpClassification(topo, not incomplete, borderline, delta,
                              bool(reaches_lower), bool(reaches_upper))
