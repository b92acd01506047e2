"""Height profiles of umbilical (f_s, phi)-graphs.

For a family with umbilical constant lambda(s) the slope function
rho = phi'/sqrt(1 + phi'^2) must solve rho' + lambda rho = 0, and the height
is recovered as phi(s) = int rho / sqrt(1 - rho^2).  When rho reaches 1 with
nonzero derivative the integrand has an integrable inverse-square-root
singularity; near such an end the integral is rewritten in the variable
u = rho, where it becomes

    int du / (|lambda(s(u))| sqrt(1 - u^2)),

and evaluated by tanh-sinh quadrature with the endpoint complement 1 - u
carried exactly.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import PPoly
from scipy.optimize import brentq
from scipy.optimize.elementwise import find_root

from .errors import DomainError, QuadratureError
from .families import FamilyKind, FamilySpec, lambda_of
from .quadrature import tanh_sinh

PHI_CAP = 25.0
RHO_FLOOR = 1e-6
SEAM_CLAMP = 1e-9


class EndKind(str, enum.Enum):
    RHO_REACHES_ONE = "rho_reaches_one"
    RHO_DECAYS_TO_ZERO = "rho_decays_to_zero"
    TRUNCATED = "truncated"


class StartKind(str, enum.Enum):
    CENTER = "center"          # rho(s_min) = 0, a single point of the base
    RHO_ONE = "rho_one"        # rho(s_min) = 1, vertical boundary leaf
    INTERIOR = "interior"      # 0 < rho(s_min) < 1


# closed forms per family --------------------------------------------------

class _Rho:
    """rho, its derivative, and the endpoint data needed by the quadrature.

    ``cmp_start(d)`` / ``cmp_end(d)`` return 1 - rho at distance ``d`` from the
    corresponding singular endpoint without cancellation.  ``abs_lam(u, om)``
    returns |lambda| on the leaf where rho = u (``om`` = 1 - u), restricted to
    the side named by ``side``.
    """

    start_kind = StartKind.CENTER
    start_singular = False
    end_singular = False
    end_pole = False
    s_left = None
    s_right = None

    def lam(self, s):
        return lambda_of(self.family, s)


class _SphericalSphere(_Rho):
    def __init__(self, family, c):
        self.family = family
        self.k = max(c, 1.0 / c)
        self.s_min = 0.0
        self.s_max = math.asin(1.0 / self.k) if self.k != 1.0 else math.pi / 2
        if self.k == 1.0:
            self.end_pole = True
            self.s_left = 0.0
            self.s_right = 0.25 * math.pi
        else:
            self.end_singular = True
            self.s_left = 0.0
            self.s_right = 0.5 * self.s_max

    def rho(self, s):
        return self.k * np.sin(s)

    def drho(self, s):
        return self.k * np.cos(s)

    def cmp_end(self, d):
        if self.k == 1.0:
            # the rounded pi/2 would leave cos(a - d/2) with an absolute error of 6e-17
            return 2.0 * np.sin(0.5 * d) ** 2
        return 2.0 * self.k * np.cos(self.s_max - 0.5 * d) * np.sin(0.5 * d)

    def abs_lam(self, u, om, side):
        # cot s with sin s = u / k
        return np.sqrt((self.k - 1.0 + om) * (self.k + u)) / u


class _HyperbolicSphere(_Rho):
    def __init__(self, family, c):
        self.family = family
        self.c = c
        self.s_min = 0.0
        self.s_max = math.asinh(1.0 / c)
        self.end_singular = True
        self.s_left = 0.0
        self.s_right = 0.5 * self.s_max

    def rho(self, s):
        return self.c * np.sinh(s)

    def drho(self, s):
        return self.c * np.cosh(s)

    def cmp_end(self, d):
        return 2.0 * self.c * np.cosh(self.s_max - 0.5 * d) * np.sinh(0.5 * d)

    def abs_lam(self, u, om, side):
        return np.sqrt(self.c * self.c + u * u) / u


class _Horosphere(_Rho):
    start_kind = StartKind.RHO_ONE
    start_singular = True

    def __init__(self, family, c):
        self.family = family
        self.c = c
        self.s_min = math.log(c)
        self.s_max = math.inf
        self.s_left = math.inf

    def rho(self, s):
        return self.c * np.exp(-np.asarray(s, dtype=float))

    def drho(self, s):
        return -self.rho(s)

    def cmp_start(self, d):
        return -np.expm1(-np.asarray(d, dtype=float))

    def abs_lam(self, u, om, side):
        return np.ones_like(u)


class _Equidistant(_Rho):
    start_kind = StartKind.RHO_ONE
    start_singular = True
    end_singular = True

    def __init__(self, family, c):
        self.family = family
        self.c = c
        self.s_max = math.acosh(1.0 / c)
        self.s_min = -self.s_max
        self.s_left = -0.5 * self.s_max
        self.s_right = 0.5 * self.s_max

    def rho(self, s):
        return self.c * np.cosh(s)

    def drho(self, s):
        return self.c * np.sinh(s)

    def cmp_end(self, d):
        return 2.0 * self.c * np.sinh(self.s_max - 0.5 * d) * np.sinh(0.5 * d)

    cmp_start = cmp_end

    def abs_lam(self, u, om, side):
        return np.sqrt((u - self.c) * (u + self.c)) / u


class _Custom(_Rho):
    start_kind = StartKind.INTERIOR

    def __init__(self, family, c):
        self.family = family
        self.c = c
        s_tab, _ = family.lambda_table
        interp = family._interp
        # exact antiderivative of the monotone cubic interpolant
        self.Lam = PPoly(interp.c, interp.x).antiderivative()
        self.s_min = float(s_tab[0])
        s_end = float(s_tab[-1])
        logc = math.log(c)
        roots = [r for r in np.atleast_1d(self.Lam.solve(logc, extrapolate=False))
                 if np.isfinite(r) and r > self.s_min]
        self.s_left = self.s_min
        if not roots:
            self.s_max = s_end
            self.truncated_end = True
            return
        self.truncated_end = False
        a = float(min(roots))
        self.s_max = a
        lam_a = float(interp(a))
        if lam_a >= 0.0:
            self.end_pole = True
            self.s_right = 0.5 * (self.s_min + a)
            return
        # terminal subinterval where rho' stays bounded away from zero
        grid = np.linspace(self.s_min, a, 2049)
        lam_grid = interp(grid)
        ok = lam_grid < 0.5 * lam_a
        first_bad = np.nonzero(~ok)[0]
        start = grid[first_bad[-1] + 1] if first_bad.size else self.s_min
        self.s_right = max(start, self.s_min + 0.25 * (a - self.s_min))
        if self.s_right >= a:
            self.end_pole = True
            self.s_right = 0.5 * (self.s_min + a)
            return
        self.end_singular = True

    def rho(self, s):
        return self.c * np.exp(-self.Lam(np.asarray(s, dtype=float)))

    def drho(self, s):
        return -self.lam(s) * self.rho(s)

    def cmp_end(self, d):
        s = self.s_max - np.asarray(d, dtype=float)
        return -np.expm1(math.log(self.c) - self.Lam(s))

    def abs_lam(self, u, om, side):
        target = math.log(self.c) - np.log1p(-om)
        shape = np.shape(u)
        lo, hi = self.s_min, self.s_max
        ends = sorted((float(self.Lam(lo)), float(self.Lam(hi))))
        flat = np.clip(np.ravel(target), *ends)
        res = find_root(lambda s, t: self.Lam(s) - t,
                        (np.full(flat.shape, lo), np.full(flat.shape, hi)),
                        args=(flat,))
        return np.abs(self.family._interp(res.x)).reshape(shape)


_CLOSED = {
    FamilyKind.SPHERE_SPHERICAL: _SphericalSphere,
    FamilyKind.SPHERE_HYPERBOLIC: _HyperbolicSphere,
    FamilyKind.HOROSPHERE: _Horosphere,
    FamilyKind.EQUIDISTANT: _Equidistant,
    FamilyKind.CUSTOM_LAMBDA: _Custom,
}


def _validate_c(family: FamilySpec, c: float):
    if not np.isfinite(c) or c <= 0:
        raise DomainError(f"c must be positive, got {c}")
    if family.kind is FamilyKind.EQUIDISTANT and c >= 1:
        raise DomainError(f"equidistant profiles need 0 < c < 1, got {c}")
    if family.kind is FamilyKind.CUSTOM_LAMBDA and c >= 1:
        raise DomainError("custom profiles start at the first table entry and need 0 < c < 1")


def domain_limit(family: FamilySpec, c: float) -> float:
    """End of the s-range where rho reaches 1 (infinity for horospheres)."""
    _validate_c(family, c)
    return _CLOSED[family.kind](family, c).s_max


# profile -----------------------------------------------------------------

@dataclass(eq=False)
class Profile:
    """rho and phi of an umbilical graph over ``family``.

    ``phi(s_min) = 0`` and phi is increasing.  ``t0`` is the limit of phi at a
    ``RHO_REACHES_ONE`` end; ``s_cut`` is the finite parameter where sampling
    stops on unbounded or truncated ends.
    """

    family: FamilySpec
    c: float
    s_min: float
    s_max: float
    start_kind: StartKind
    end_kind: EndKind
    _rho: _Rho = field(repr=False)
    t0: float | None = None
    phi_left: float = 0.0
    s_cut: float = math.nan

    # pointwise quantities --------------------------------------------------

    @property
    def s_range(self) -> tuple[float, float]:
        return (self.s_min, self.s_max)

    @property
    def width(self) -> float:
        """Length of the sampled s-range, finite for every profile."""
        hi = self.s_max if self.end_kind is EndKind.RHO_REACHES_ONE else self.s_cut
        return hi - self.s_min

    def rho(self, s):
        return self._rho.rho(np.asarray(s, dtype=float))

    def drho(self, s):
        """rho' from the identity rho' = -lambda rho, in closed form where lambda blows up."""
        return self._rho.drho(np.asarray(s, dtype=float))

    def lam(self, s):
        return self._rho.lam(np.asarray(s, dtype=float))

    def umbilical_value(self, s):
        """Common principal curvature -rho * lambda of the graph."""
        return self.drho(s)

    def one_minus_rho(self, s, d_start=None, d_end=None):
        s = np.asarray(s, dtype=float)
        out = 1.0 - self.rho(s)
        r = self._rho
        if r.end_singular or r.end_pole:
            d = self.s_max - s if d_end is None else np.asarray(d_end, dtype=float)
            m = s > r.s_right
            out = np.where(m, r.cmp_end(np.where(m, d, 1.0)), out)
        if r.start_singular:
            d = s - self.s_min if d_start is None else np.asarray(d_start, dtype=float)
            m = s < r.s_left
            out = np.where(m, r.cmp_start(np.where(m, d, 1.0)), out)
        return out

    def dphi(self, s, d_start=None, d_end=None):
        rho = self.rho(s)
        om = self.one_minus_rho(s, d_start, d_end)
        return rho / np.sqrt(om * (1.0 + rho))

    def theta(self, s, d_start=None, d_end=None):
        """Angle function sqrt(1 - rho^2) = 1 / sqrt(1 + phi'^2)."""
        rho = self.rho(s)
        om = self.one_minus_rho(s, d_start, d_end)
        return np.sqrt(om * (1.0 + rho))

    # height ------------------------------------------------------------------

    def _tail(self, cmp, side):
        """int_{1-cmp}^{1} du / (|lambda| sqrt(1 - u^2))."""
        cmp = np.asarray(cmp, dtype=float)
        r = self._rho

        def f(u, dlo, dhi):
            om = dhi
            return 1.0 / (r.abs_lam(u, om, side) * np.sqrt(om * (2.0 - om)))

        out = np.zeros(cmp.shape)
        live = cmp > 0
        if np.any(live):
            c = cmp[live]
            out[live] = tanh_sinh(f, 1.0 - c, np.ones_like(c), width=c)
        return out if out.ndim else float(out)

    def _middle(self, lo, hi, d_hi=None):
        r = self._rho
        lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))

        if not r.end_pole:
            def g(x, dlo, dhi):
                rho = r.rho(x)
                return rho / np.sqrt((1.0 - rho) * (1.0 + rho))

            return tanh_sinh(g, lo, hi)
        # rho -> 1 at a pole with phi unbounded: integrate in v = log(s_max - s),
        # where the integrand tends to a constant, with 1 - rho taken from d
        d_lo = self.s_max - lo
        d_hi = self.s_max - hi if d_hi is None else np.broadcast_to(d_hi, hi.shape)

        def h(v, dlo, dhi):
            d = np.exp(v)
            rho = r.rho(self.s_max - d)
            return d * rho / np.sqrt(r.cmp_end(d) * (1.0 + rho))

        return tanh_sinh(h, np.log(d_hi), np.log(d_lo))

    def phi(self, s, d_start=None, d_end=None):
        """Height phi(s) with phi(s_min) = 0.

        ``d_start`` / ``d_end`` optionally give s - s_min and s_max - s when
        they are known more accurately than the differences.
        """
        s = np.asarray(s, dtype=float)
        r = self._rho
        hi_ok = self.s_max if r.end_singular else self.s_max
        if np.any(s < self.s_min) or np.any(s > hi_ok) or np.any(np.isnan(s)):
            raise DomainError(f"s outside the profile range [{self.s_min}, {self.s_max})")
        if np.isinf(self.s_max) and np.any(np.isinf(s)):
            raise DomainError("phi is only defined at finite s")
        if r.end_pole and np.any(s >= self.s_max):
            raise DomainError("phi is unbounded at this end")
        d_start = s - self.s_min if d_start is None else np.broadcast_to(d_start, s.shape)
        d_end = self.s_max - s if d_end is None else np.broadcast_to(d_end, s.shape)
        out = np.empty(s.shape)
        tail = np.zeros(s.shape, bool) if not r.end_singular else s > r.s_right
        head = np.zeros(s.shape, bool) if not r.start_singular else (s < r.s_left) & ~tail
        mid = ~tail & ~head
        if np.any(head):
            out[head] = self._tail(r.cmp_start(d_start[head]), "start")
        if np.any(tail):
            out[tail] = self.t0 - self._tail(r.cmp_end(d_end[tail]), "end")
        if np.any(mid):
            out[mid] = self.phi_left + self._middle(r.s_left, s[mid], d_end[mid])
        return out

    # parameter for regular sampling ---------------------------------------

    @property
    def q_interval(self) -> tuple[float, float]:
        """Range of the regularizing parameter q used by samplers."""
        r = self._rho
        if r.start_singular and r.end_singular:
            return (-0.5 * math.pi, 0.5 * math.pi)
        if r.end_singular:
            return (0.0, 0.5 * math.pi)
        if r.start_singular:
            return (0.0, math.sqrt(self.s_cut - self.s_min))
        return (self.s_min, self.s_cut)

    def s_from_q(self, q):
        """Map q to (s, s - s_min, s_max - s).

        Singular ends are reached quadratically in q, which makes the graph
        regular there in q even though phi'(s) is unbounded.
        """
        q = np.asarray(q, dtype=float)
        r = self._rho
        if r.start_singular and r.end_singular:
            mid = 0.5 * (self.s_min + self.s_max)
            half = 0.5 * (self.s_max - self.s_min)
            s = mid + half * np.sin(q)
            d_end = 2.0 * half * np.sin(0.25 * math.pi - 0.5 * q) ** 2
            d_start = 2.0 * half * np.sin(0.25 * math.pi + 0.5 * q) ** 2
            return s, d_start, d_end
        if r.end_singular:
            span = self.s_max - self.s_min
            s = self.s_min + span * np.sin(q)
            return s, span * np.sin(q), 2.0 * span * np.sin(0.25 * math.pi - 0.5 * q) ** 2
        if r.start_singular:
            d_start = q * q
            s = self.s_min + d_start
            return s, d_start, self.s_max - s
        return q, q - self.s_min, self.s_max - q

    def q_from_s(self, s):
        s = np.asarray(s, dtype=float)
        r = self._rho
        if r.start_singular and r.end_singular:
            mid = 0.5 * (self.s_min + self.s_max)
            half = 0.5 * (self.s_max - self.s_min)
            return np.arcsin(np.clip((s - mid) / half, -1.0, 1.0))
        if r.end_singular:
            return np.arcsin(np.clip((s - self.s_min) / (self.s_max - self.s_min), 0.0, 1.0))
        if r.start_singular:
            return np.sqrt(s - self.s_min)
        return s

    def sample_s(self, count: int) -> np.ndarray:
        """Uniform s-grid from s_min to the clamped seam or the cut."""
        if self.end_kind is EndKind.RHO_REACHES_ONE:
            hi = self.s_max - SEAM_CLAMP * (self.s_max - self.s_min)
        else:
            hi = self.s_cut
        return np.linspace(self.s_min, hi, count)


def solve_rho(family: FamilySpec, c: float = 1.0, phi_cap: float = PHI_CAP,
              rho_floor: float = RHO_FLOOR) -> Profile:
    """Build the profile of the umbilical graph over ``family`` with constant ``c``.

    Spheres of S^n use rho = max(c, 1/c) sin s (rho = sin s when c = 1),
    spheres of H^n rho = c sinh s, horospheres rho = c exp(-s) on
    (log c, inf), equidistants rho = c cosh s on (-a, a), and custom tables
    rho = c exp(-int lambda) from the first table entry.
    """
    _validate_c(family, c)
    r = _CLOSED[family.kind](family, float(c))
    if r.end_singular:
        end = EndKind.RHO_REACHES_ONE
    elif family.kind is FamilyKind.HOROSPHERE:
        end = EndKind.RHO_DECAYS_TO_ZERO
    else:
        end = EndKind.TRUNCATED
    prof = Profile(family, float(c), r.s_min, r.s_max, r.start_kind, end, r)
    if r.start_singular and np.isfinite(r.s_left):
        prof.phi_left = float(prof._tail(r.cmp_start(r.s_left - r.s_min), "start"))
    if r.end_singular:
        prof.t0 = float(prof.phi_left + prof._middle(r.s_left, r.s_right)
                        + prof._tail(r.cmp_end(r.s_max - r.s_right), "end"))
        prof.s_cut = r.s_max
    elif end is EndKind.RHO_DECAYS_TO_ZERO:
        prof.s_cut = r.s_min + math.log(1.0 / rho_floor)
        if family.kind is FamilyKind.HOROSPHERE:
            prof.s_cut = math.log(c / rho_floor)
    elif r.end_pole:
        lo = r.s_min
        hi = r.s_max * (1 - 1e-15) if r.s_max > 0 else r.s_max - 1e-15
        hi = np.nextafter(r.s_max, -math.inf)
        f = lambda s: float(prof.phi(s)) - phi_cap
        if f(hi) <= 0:
            prof.s_cut = hi
        else:
            prof.s_cut = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    else:
        prof.s_cut = r.s_max
    return prof


def phi_of(profile: Profile, s):
    return profile.phi(s)


def vertical_half_extent(profile: Profile) -> float | None:
    """Limit of phi at a closing end, None when phi is unbounded or only asymptotic."""
    if profile.end_kind is EndKind.RHO_REACHES_ONE:
        return profile.t0
    return None


def phi_supremum(profile: Profile) -> float:
    """Supremum of phi over the whole range (inf for unbounded profiles)."""
    if profile.end_kind is EndKind.RHO_REACHES_ONE:
        return profile.t0
    if profile.end_kind is EndKind.RHO_DECAYS_TO_ZERO and profile._rho.start_singular \
            and not np.isfinite(profile._rho.s_left):
        return float(profile._tail(np.array(1.0), "start"))
    if profile._rho.end_pole:
        return math.inf
    return float(profile.phi(profile.s_max))


def ode_residual(profile: Profile, s, step: float | None = None) -> np.ndarray:
    """|rho' + lambda rho| with rho' from central differences."""
    s = np.asarray(s, dtype=float)
    if step is None:
        step = 1e-6 * profile.width
    d = (profile.rho(s + step) - profile.rho(s - step)) / (2 * step)
    return np.abs(d + profile.lam(s) * profile.rho(s))


def endpoint_check(profile: Profile, step: float | None = None) -> dict:
    """Convergence data for the singular end(s): rho there, one-sided rho', quadrature error.

    rho' uses the second-order one-sided stencil (3 f0 - 4 f1 + f2) / (2 h)
    taken from inside the range.
    """
    r = profile._rho
    step = 1e-4 * profile.width if step is None else step
    out = {}
    for side, on in (("start", r.start_singular), ("end", r.end_singular)):
        if not on:
            continue
        if side == "end":
            a, sign = profile.s_max, -1.0
            cmp = r.cmp_end(np.array(profile.s_max - r.s_right))
        else:
            a, sign = profile.s_min, 1.0
            upper = r.s_left if np.isfinite(r.s_left) else profile.s_min + 1.0
            cmp = r.cmp_start(np.array(upper - profile.s_min))
        f0, f1, f2 = (float(profile.rho(a + sign * k * step)) for k in range(3))
        drho = sign * (-3 * f0 + 4 * f1 - f2) / (2 * step)
        _, err = tanh_sinh(
            lambda u, dlo, dhi: 1.0 / (r.abs_lam(u, dhi, side) * np.sqrt(dhi * (2 - dhi))),
            1.0 - cmp, np.ones_like(cmp), width=cmp, return_error=True)
        out[side] = {"s": a, "rho": f0, "drho": drho, "error_estimate": float(err)}
    return out


def write_profile_csv(profile: Profile, samples: int, path) -> np.ndarray:
    """Write ``samples`` rows of s, rho, phi, lambda; returns the table."""
    if samples < 2:
        raise DomainError("need at least two samples")
    s = profile.sample_s(samples)
    rho = profile.rho(s)
    phi = profile.phi(s)
    with np.errstate(divide="ignore"):
        lam = np.where(rho == 0, -math.inf, -profile.drho(s) / np.where(rho == 0, 1.0, rho))
    table = np.column_stack([s, rho, phi, lam])
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "rho", "phi", "lambda"])
        for row in table:
            w.writerow([f"{v:.14e}" for v in row])
    return table


__all__ = [
    "EndKind", "StartKind", "Profile", "solve_rho", "domain_limit", "phi_of",
    "vertical_half_extent", "phi_supremum", "ode_residual", "endpoint_check",
    "write_profile_csv", "QuadratureError",
]
