import math

import numpy as np
import pytest

from umbilic import spaceform as sf
from umbilic.assemble import (Piece, SymmetryClass, Topology, assemble,
                              boundary_verticality_check, chart_grid, periodicity_error,
                              reflection_symmetry_error, sample_assembly, seam_continuity_error,
                              vertical_diameter)
from umbilic.errors import AssemblyError, DomainError
from umbilic.families import custom_family
from umbilic.profile import solve_rho

from conftest import built


def test_sphere_like():
    _, prof, h = built("sphere_s", 2, 2.0)
    assert h.topology is Topology.SPHERE and h.symmetry_class is SymmetryClass.ELLIPTIC
    assert vertical_diameter(h) == pytest.approx(2 * math.acosh(2 / math.sqrt(3)), abs=1e-12)
    assert h.symmetry_planes == [prof.t0]
    assert [(p.sigma, p.tau) for p in h.pieces] == [(1.0, 0.0), (-1.0, 2 * prof.t0)]


def test_unit_sphere_profile_is_ball():
    _, _, h = built("sphere_s", 2, 1.0)
    assert h.topology is Topology.BALL and len(h.pieces) == 1
    assert vertical_diameter(h) is None


def test_horosphere_ball_in_slab():
    _, _, h = built("horosphere", 2, 1.0)
    assert h.topology is Topology.BALL and h.symmetry_class is SymmetryClass.PARABOLIC
    assert h.slab == (-math.pi / 2, math.pi / 2)
    cloud = sample_assembly(h, n_q=61, n_chart=8)
    t = cloud.points[..., -1]
    assert np.all(np.abs(t) < math.pi / 2)


def test_equidistant_periodic():
    _, prof, h = built("equidistant", 2, 0.5)
    assert h.topology is Topology.PERIODIC_PLANE and h.symmetry_class is SymmetryClass.HYPERBOLIC
    assert h.period == pytest.approx(2 * prof.t0)
    assert len(h.pieces) == 5
    assert h.symmetry_planes == pytest.approx([k * prof.t0 for k in range(-2, 4)])
    assert h.metadata()["period"] == pytest.approx(2 * math.pi)


def test_k_range_configurable():
    fam, prof, _ = built("equidistant", 2, 0.5)
    h = assemble(fam, prof, k_range=(-1, 3))
    assert len(h.pieces) == 5 and h.k_range == (-1, 3)
    with pytest.raises(DomainError):
        assemble(fam, prof, k_range=(1, 3))


def test_custom_not_assemblable():
    s = np.linspace(0, 2, 201)
    fam = custom_family(sf.hyperbolic(2), s, -np.tanh(s))
    with pytest.raises(AssemblyError):
        assemble(fam, solve_rho(fam, 0.5))


def test_profile_family_mismatch():
    fam, _, _ = built("sphere_s", 2, 2.0)
    _, other, _ = built("sphere_h", 2, 0.5)
    with pytest.raises(AssemblyError):
        assemble(fam, other)


@pytest.mark.parametrize("name,c", [("sphere_s", 2.0), ("sphere_s", 0.5), ("sphere_h", 0.5),
                                    ("sphere_h", 2.0)])
def test_reflection_symmetry(name, c):
    _, _, h = built(name, 2, c)
    assert reflection_symmetry_error(h) <= 1e-9


def test_reflection_symmetry_n3():
    _, _, h = built("sphere_h", 3, 0.5)
    assert reflection_symmetry_error(h, sample_assembly(h, n_q=21, n_chart=8)) <= 1e-9


@pytest.mark.parametrize("c", [0.3, 0.5])
def test_periodicity(c):
    _, _, h = built("equidistant", 2, c)
    assert periodicity_error(h) <= 1e-9


@pytest.mark.parametrize("name,c", [("sphere_s", 2.0), ("sphere_h", 0.5), ("equidistant", 0.5)])
def test_seams_continuous(name, c):
    _, _, h = built(name, 2, c)
    assert seam_continuity_error(h) <= 1e-9


@pytest.mark.parametrize("name,c", [("sphere_s", 2.0), ("equidistant", 0.5), ("horosphere", 1.0)])
def test_verticality_at_seam(name, c):
    fam, prof, _ = built(name, 2, c)
    assert boundary_verticality_check(fam, prof) <= 1e-2


def test_verticality_needs_rho_one_end():
    fam, prof, _ = built("sphere_s", 2, 1.0)
    with pytest.raises(DomainError):
        boundary_verticality_check(fam, prof)


def test_sample_cloud_shapes():
    _, _, h = built("sphere_s", 3, 2.0)
    cloud = sample_assembly(h, n_q=5, n_chart=4)
    assert cloud.points.shape == (2, 5, 4, 4, 5)
    pts, s, chart, theta, k, piece = cloud.flat()
    assert pts.shape == (2 * 5 * 16, 5) and chart.shape[1] == 2
    assert set(np.unique(piece)) == {0, 1}
    # the mirrored piece has the opposite angle function
    assert np.allclose(cloud.theta[0], -cloud.theta[1])
    with pytest.raises(DomainError):
        sample_assembly(h, n_q=1)


def test_chart_grid():
    fam, _, _ = built("horosphere", 3, 1.0)
    axes = chart_grid(fam, 5)
    assert len(axes) == 2 and axes[0][0] == -fam.box_half_width


def test_piece_apply():
    assert np.allclose(Piece(-1.0, 2.0).apply([0.0, 0.5]), [2.0, 1.5])


def test_non_sphere_errors():
    _, _, h = built("equidistant", 2, 0.5)
    with pytest.raises(DomainError):
        reflection_symmetry_error(h)
    _, _, h = built("sphere_s", 2, 2.0)
    with pytest.raises(DomainError):
        periodicity_error(h)
