"""Complete umbilical hypersurfaces glued from graph pieces.

A piece is the graph of a profile moved by an exact height map
t -> sigma * t + tau with sigma = +1 or -1.  Rotational spheres close up with
one reflection across t0; horosphere graphs are doubled across t = 0; the
equidistant piece is reflected repeatedly across the planes t = k phi(a).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import AssemblyError, DomainError
from .families import SPHERE_KINDS, FamilyKind, FamilySpec
from .graph import graph_arrays
from .profile import EndKind, Profile

PROBE = 1e-6


class Topology(str, enum.Enum):
    BALL = "ball"
    SPHERE = "sphere"
    ANNULUS = "annulus"
    PERIODIC_PLANE = "periodic_plane"


class SymmetryClass(str, enum.Enum):
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class Piece:
    sigma: float
    tau: float

    def apply(self, t):
        return self.sigma * np.asarray(t) + self.tau


@dataclass(eq=False)
class AssembledHypersurface:
    family: FamilySpec
    profile: Profile
    pieces: list[Piece]
    topology: Topology
    symmetry_class: SymmetryClass
    symmetry_planes: list[float]
    vertical_diameter: float | None = None
    slab: tuple[float, float] | None = None
    period: float | None = None
    height_range: tuple[float, float] = (-math.inf, math.inf)
    center_shift: float = 0.0
    k_range: tuple[int, int] | None = None

    def metadata(self) -> dict:
        meta = {
            "topology": self.topology.value,
            "symmetry_class": self.symmetry_class.value,
            "symmetry_planes": [float(t) for t in self.symmetry_planes],
        }
        if self.vertical_diameter is not None:
            meta["vertical_diameter"] = float(self.vertical_diameter)
        if self.slab is not None:
            meta["slab"] = [float(self.slab[0]), float(self.slab[1])]
        if self.period is not None:
            meta["period"] = float(self.period)
        return meta


def assemble(family: FamilySpec, profile: Profile, k_range: tuple[int, int] = (-2, 2)
             ) -> AssembledHypersurface:
    """Glue the complete hypersurface generated by ``profile``.

    ``k_range`` bounds the reflected copies of the equidistant piece.
    """
    if profile.family is not family:
        raise AssemblyError("profile was built for a different family")
    kind = family.kind
    if kind is FamilyKind.CUSTOM_LAMBDA:
        raise AssemblyError("custom lambda profiles have no embedded leaves to glue")
    if kind in SPHERE_KINDS:
        if profile.end_kind is EndKind.RHO_REACHES_ONE:
            t0 = profile.t0
            return AssembledHypersurface(
                family, profile, [Piece(1.0, 0.0), Piece(-1.0, 2.0 * t0)],
                Topology.SPHERE, SymmetryClass.ELLIPTIC, [t0],
                vertical_diameter=2.0 * t0, height_range=(0.0, 2.0 * t0), center_shift=t0)
        return AssembledHypersurface(
            family, profile, [Piece(1.0, 0.0)], Topology.BALL, SymmetryClass.ELLIPTIC, [],
            height_range=(0.0, math.inf))
    if kind is FamilyKind.HOROSPHERE:
        half = math.pi / 2
        return AssembledHypersurface(
            family, profile, [Piece(1.0, 0.0), Piece(-1.0, 0.0)], Topology.BALL,
            SymmetryClass.PARABOLIC, [0.0], slab=(-half, half), height_range=(-half, half))
    if profile.end_kind is not EndKind.RHO_REACHES_ONE:
        raise AssemblyError("equidistant gluing needs rho to reach 1 at both ends")
    k_lo, k_hi = k_range
    if k_lo > 0 or k_hi < 0:
        raise DomainError("k_range must contain 0")
    ta = profile.t0
    pieces = [Piece(1.0, k * ta) if k % 2 == 0 else Piece(-1.0, (k + 1) * ta)
              for k in range(k_lo, k_hi + 1)]
    planes = [k * ta for k in range(k_lo, k_hi + 2)]
    return AssembledHypersurface(
        family, profile, pieces, Topology.PERIODIC_PLANE, SymmetryClass.HYPERBOLIC, planes,
        period=2.0 * ta, height_range=(-math.inf, math.inf), k_range=(k_lo, k_hi))


def vertical_diameter(h: AssembledHypersurface) -> float | None:
    """max t - min t of a compact assembly, None otherwise."""
    if h.topology is not Topology.SPHERE:
        return None
    return h.vertical_diameter


def boundary_verticality_check(family: FamilySpec, profile: Profile) -> float:
    """Largest angle function sqrt(1 - rho^2) just inside the gluing ends.

    The probe distance is 1e-6 of the sampled s-range.
    """
    r = profile._rho
    if not (r.end_singular or r.start_singular):
        raise DomainError("profile has no end where rho reaches 1")
    probe = PROBE * profile.width
    vals = []
    if r.end_singular:
        vals.append(profile.theta(profile.s_max - probe, d_end=probe))
    if r.start_singular:
        vals.append(profile.theta(profile.s_min + probe, d_start=probe))
    return float(np.max(vals))


# sampling ----------------------------------------------------------------------

@dataclass(frozen=True)
class SampleCloud:
    """Sampled points of an assembly on a (q, chart) grid per piece.

    ``points`` has shape (pieces, n_q, n_chart..., n + 2); the flat views
    below list one row per sample.
    """

    points: np.ndarray
    s: np.ndarray
    chart: np.ndarray
    theta: np.ndarray
    k: np.ndarray
    piece: np.ndarray = field(repr=False)

    def flat(self):
        m = self.points.shape[-1]
        c = self.chart.shape[-1]
        return (self.points.reshape(-1, m), self.s.reshape(-1), self.chart.reshape(-1, c),
                self.theta.reshape(-1), self.k.reshape(-1), self.piece.reshape(-1))


def chart_grid(family: FamilySpec, count: int) -> list[np.ndarray]:
    """Per-coordinate chart samples: angles for spheres, the box for flat charts."""
    k = family.chart_dim
    if family.kind in SPHERE_KINDS:
        axes = [np.linspace(0.0, math.pi, count) for _ in range(k - 1)]
        axes.append(np.linspace(0.0, 2 * math.pi, count))
        return axes
    L = family.box_half_width
    return [np.linspace(-L, L, count) for _ in range(k)]


def sample_profile_q(profile: Profile, count: int) -> np.ndarray:
    """q grid covering the full sampled range, seams included exactly."""
    lo, hi = profile.q_interval
    return np.linspace(lo, hi, count)


def sample_assembly(h: AssembledHypersurface, n_q: int = 41, n_chart: int = 24,
                    chart_axes=None) -> SampleCloud:
    """Evaluate every piece on the same (q, chart) grid."""
    if n_q < 2 or n_chart < 2:
        raise DomainError("need at least two samples per direction")
    family, profile = h.family, h.profile
    q = sample_profile_q(profile, n_q)
    s, ds, de = profile.s_from_q(q)
    axes = chart_axes if chart_axes is not None else chart_grid(family, n_chart)
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    cshape = mesh.shape[:-1]
    expand = (slice(None),) + (None,) * len(cshape)
    S = np.broadcast_to(s[expand], (n_q,) + cshape)
    DS = np.broadcast_to(ds[expand], S.shape)
    DE = np.broadcast_to(de[expand], S.shape)
    C = np.broadcast_to(mesh, (n_q,) + mesh.shape)
    g = graph_arrays(family, profile, S, C, DS, DE)
    pts, thetas = [], []
    for piece in h.pieces:
        p = g.position.copy()
        p[..., -1] = piece.apply(g.height)
        pts.append(p)
        thetas.append(piece.sigma * g.theta)
    npieces = len(h.pieces)
    piece_idx = np.broadcast_to(np.arange(npieces).reshape((-1,) + (1,) * S.ndim),
                                (npieces,) + S.shape)
    return SampleCloud(
        points=np.stack(pts),
        s=np.broadcast_to(S, (npieces,) + S.shape),
        chart=np.broadcast_to(C, (npieces,) + C.shape),
        theta=np.stack(thetas),
        k=np.broadcast_to(g.umbilic, (npieces,) + S.shape),
        piece=piece_idx,
    )


def _match_error(a: np.ndarray, b: np.ndarray) -> float:
    """Largest nearest-neighbour distance from each row of ``a`` to the set ``b``."""
    tree = cKDTree(b)
    d, _ = tree.query(a, k=1)
    return float(np.max(d))


def reflection_symmetry_error(h: AssembledHypersurface, cloud: SampleCloud | None = None) -> float:
    """Set distance between a SphereLike sample cloud and its image under t -> 2 t0 - t."""
    if h.topology is not Topology.SPHERE:
        raise DomainError("reflection symmetry applies to sphere-like assemblies")
    cloud = cloud or sample_assembly(h)
    pts = cloud.flat()[0]
    t0 = h.symmetry_planes[0]
    mirrored = pts.copy()
    mirrored[:, -1] = 2.0 * t0 - mirrored[:, -1]
    return max(_match_error(mirrored, pts), _match_error(pts, mirrored))


def periodicity_error(h: AssembledHypersurface, cloud: SampleCloud | None = None) -> float:
    """Set distance after t -> t + period on the window where both copies are sampled."""
    if h.period is None:
        raise DomainError("assembly is not periodic")
    cloud = cloud or sample_assembly(h)
    pts = cloud.flat()[0]
    shifted = pts.copy()
    shifted[:, -1] += h.period
    lo, hi = pts[:, -1].min(), pts[:, -1].max()
    eps = 1e-9 * h.period
    inside = shifted[(shifted[:, -1] >= lo - eps) & (shifted[:, -1] <= hi + eps)]
    if inside.shape[0] == 0:
        raise DomainError("no overlapping window")
    return _match_error(inside, pts)


def seam_continuity_error(h: AssembledHypersurface, n_chart: int = 24) -> float:
    """Largest gap between consecutive pieces along the seam where they meet.

    Both pieces share the base points there, so the gap is the height
    difference; each pair is checked at whichever rho = 1 end joins it.
    """
    profile = h.profile
    r = profile._rho
    axes = chart_grid(h.family, n_chart)
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, h.family.chart_dim)
    zeros = np.zeros(len(mesh))
    seam_heights = []
    if r.end_singular:
        g = graph_arrays(h.family, profile, np.full(len(mesh), profile.s_max), mesh, None, zeros)
        seam_heights.append(g.height)
    if r.start_singular:
        g = graph_arrays(h.family, profile, np.full(len(mesh), profile.s_min), mesh, zeros, None)
        seam_heights.append(g.height)
    if not seam_heights:
        return 0.0
    worst = 0.0
    for a, b in zip(h.pieces[:-1], h.pieces[1:]):
        gap = min(float(np.max(np.abs(a.apply(t) - b.apply(t)))) for t in seam_heights)
        worst = max(worst, gap)
    return worst
