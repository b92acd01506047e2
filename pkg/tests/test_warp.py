import math

import numpy as np
import pytest

from umbilic.assemble import Topology, sample_assembly
from umbilic.errors import DomainError, EmptySlabError
from umbilic.warp import (F_inverse, F_of, OmegaKind, WarpSpec, centered_height_range,
                          classify_warped, load_omega_table, map_to_product, parse_omega,
                          placement, pull_back)

from conftest import built


def test_F_examples():
    assert F_of(WarpSpec("t"), 1.0) == pytest.approx(0.0)
    assert F_of(WarpSpec("exp-neg"), 0.0) == pytest.approx(1.0)
    assert F_of(WarpSpec("const", k=2.0), 3.0) == pytest.approx(1.5)
    assert F_inverse(WarpSpec("t"), 0.0) == pytest.approx(1.0)
    assert F_inverse(WarpSpec("exp-neg"), 1.0) == pytest.approx(0.0)


@pytest.mark.parametrize("kind", ["t", "exp-neg", "const", "cosh"])
def test_F_derivative_is_inverse_omega(kind):
    spec = WarpSpec(kind)
    t = np.array([0.3, 0.9, 1.7])
    h = 1e-6
    dF = (spec.F_raw(t + h) - spec.F_raw(t - h)) / (2 * h)
    assert np.allclose(dF, 1.0 / spec.omega(t), rtol=1e-8)
    dw = (spec.omega(t + h) - spec.omega(t - h)) / (2 * h)
    assert np.allclose(dw, spec.domega(t), rtol=1e-8)
    assert np.allclose(spec.F_inverse_raw(spec.F_raw(t)), t, atol=1e-12)


def test_J_and_delta():
    assert WarpSpec("t").delta == math.inf
    assert WarpSpec("exp-neg").J_raw == (0.0, math.inf)
    assert WarpSpec("cosh").delta == pytest.approx(math.pi / 2)
    spec = parse_omega("const:2", 0.4)
    assert spec.interval_I == (-0.8, 0.8) and spec.delta == pytest.approx(0.4)


def test_table_round_trip(tmp_path):
    t = np.linspace(-2, 2, 41)
    path = tmp_path / "omega.csv"
    path.write_text("t,omega\n" + "".join(f"{a},{math.cosh(a)}\n" for a in t))
    spec = parse_omega(f"table:{path}")
    assert spec.kind is OmegaKind.TABLE
    lo, hi = spec.J_raw
    u = np.linspace(lo, hi, 23)[1:-1]
    assert np.max(np.abs(spec.F_raw(spec.F_inverse_raw(u)) - u)) <= 1e-12
    # F of the tabulated cosh follows 2 atan(tanh(t/2)) up to interpolation error
    assert hi - lo == pytest.approx(2 * math.atan(math.sinh(2.0)), abs=1e-4)
    tt, ww = load_omega_table(path)
    assert len(tt) == 41


def test_domain_errors():
    with pytest.raises(DomainError):
        WarpSpec("t").omega(-1.0)
    with pytest.raises(DomainError):
        WarpSpec("exp-neg").F_inverse_raw(-0.5)
    with pytest.raises(DomainError):
        WarpSpec("const", k=0.0)
    with pytest.raises(DomainError):
        parse_omega("sin")
    with pytest.raises(DomainError):
        parse_omega("t", 0.4)
    with pytest.raises(DomainError):
        WarpSpec("table", table=(np.array([0.0, 1.0]), np.array([1.0, -1.0])))


def test_placement():
    _, _, h = built("sphere_s", 2, 2.0)
    assert centered_height_range(h) == pytest.approx((-h.profile.t0, h.profile.t0))
    assert placement(WarpSpec("t"), h) == 0.0
    assert placement(parse_omega("const:1", 0.4), h) == 0.0
    # half-infinite J: the bottom of the object sits one unit above the end
    assert placement(WarpSpec("exp-neg"), h) == pytest.approx(1.0 + h.profile.t0)


@pytest.mark.parametrize("kind", ["t", "exp-neg"])
@pytest.mark.parametrize("name,c", [("sphere_s", 2.0), ("sphere_h", 0.5), ("sphere_h", 1.0)])
def test_infinite_delta_spheres_complete(kind, name, c):
    _, _, h = built(name, 2, c)
    cls = classify_warped(WarpSpec(kind), h)
    assert cls.topology is Topology.SPHERE and cls.complete


def test_constant_slab_cuts_sphere_into_annulus():
    _, _, h = built("sphere_s", 2, 2.0)
    cls = classify_warped(parse_omega("const:1", 0.4), h)
    assert cls.topology is Topology.ANNULUS and not cls.borderline
    cls = classify_warped(parse_omega("const:1", 0.6), h)
    assert cls.topology is Topology.SPHERE and cls.complete


def test_borderline_diameter():
    _, prof, h = built("sphere_s", 2, 2.0)
    cls = classify_warped(parse_omega("const:1", prof.t0), h)
    assert cls.topology is Topology.ANNULUS and cls.borderline


def test_horosphere_completeness_threshold():
    _, _, h = built("horosphere", 2, 1.0)
    assert classify_warped(parse_omega("const:1", 2.0), h).complete
    assert not classify_warped(parse_omega("const:1", 1.0), h).complete
    assert classify_warped(WarpSpec("cosh"), h).complete


def test_equidistant_under_identity_warp_incomplete():
    _, _, h = built("equidistant", 2, 0.5)
    cls = classify_warped(WarpSpec("t"), h)
    assert cls.topology is Topology.BALL and not cls.complete
    assert classify_warped(WarpSpec("exp-neg"), h).complete


def test_pull_back_round_trip():
    _, _, h = built("sphere_h", 2, 0.5)
    spec = WarpSpec("t")
    cloud = sample_assembly(h, n_q=9, n_chart=6)
    w = pull_back(spec, h, cloud)
    assert w.dropped == 0 and w.kept == cloud.points[..., 0].size
    back = map_to_product(spec, h, w)
    assert np.allclose(back, cloud.flat()[0], atol=1e-12)


def test_pull_back_clips_to_slab():
    _, _, h = built("sphere_s", 2, 2.0)
    w = pull_back(parse_omega("const:1", 0.3), h, n_q=21, n_chart=6)
    assert w.dropped > 0 and w.kept > 0
    assert np.all(np.abs(w.t) < 0.3)


def test_constant_unit_warp_is_identity_up_to_shift():
    _, _, h = built("sphere_h", 2, 0.5)
    cloud = sample_assembly(h, n_q=9, n_chart=6)
    w = pull_back(WarpSpec("const"), h, cloud)
    assert np.allclose(w.t, cloud.flat()[0][:, -1] - h.center_shift)


def test_empty_slab():
    _, _, h = built("sphere_s", 2, 2.0)
    cloud = sample_assembly(h, n_q=5, n_chart=4)
    far = type(cloud)(cloud.points + np.append(np.zeros(3), 50.0), cloud.s, cloud.chart,
                      cloud.theta, cloud.k, cloud.piece)
    with pytest.raises(EmptySlabError):
        pull_back(parse_omega("const:1", 0.4), h, far)
