import math

import numpy as np
import pytest

from umbilic import spaceform as sf
from umbilic.errors import DomainError


@pytest.mark.parametrize("eps", [1, -1])
def test_origin_on_model(eps):
    space = sf.SpaceForm(eps, 3)
    assert sf.is_model_point(space, space.origin())
    assert sf.constraint_residual(space, space.origin()) == pytest.approx(0.0)


def test_lorentzian_inner():
    H = sf.hyperbolic(2)
    u = np.array([2.0, 1.0, 3.0])
    v = np.array([1.0, 4.0, -1.0])
    assert sf.model_inner(H, u, v) == pytest.approx(-2.0 + 4.0 - 3.0)
    S = sf.sphere(2)
    assert sf.model_inner(S, u, v) == pytest.approx(2.0 + 4.0 - 3.0)


def test_bad_space():
    with pytest.raises(DomainError):
        sf.SpaceForm(0, 2)
    with pytest.raises(DomainError):
        sf.SpaceForm(1, 1)


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        sf.model_inner(sf.sphere(2), np.ones(3), np.ones(4))


@pytest.mark.parametrize("eps", [1, -1])
def test_geodesic_unit_speed_and_distance(eps):
    space = sf.SpaceForm(eps, 3)
    p = space.origin()
    v = space.basis_vector(2)
    s = np.linspace(0.0, 1.2, 7)
    x = sf.geodesic(space, p, v, s)
    assert np.all(np.abs(sf.constraint_residual(space, x)) < 1e-12)
    assert np.allclose(sf.distance(space, p, x), s, atol=1e-12)
    w = sf.geodesic_velocity(space, p, v, s)
    assert np.allclose(sf.model_inner(space, w, w), 1.0, atol=1e-12)
    assert np.allclose(sf.model_inner(space, w, x), 0.0, atol=1e-12)


def test_geodesic_needs_unit_velocity():
    S = sf.sphere(2)
    with pytest.raises(DomainError):
        sf.geodesic(S, S.origin(), np.array([0.0, 2.0, 0.0]), 0.5)


@pytest.mark.parametrize("eps", [1, -1])
def test_project_tangent(eps):
    space = sf.SpaceForm(eps, 3)
    p = sf.geodesic(space, space.origin(), space.basis_vector(1), 0.7)
    w = np.array([0.3, -1.0, 2.0, 0.5])
    t = sf.project_tangent(space, p, w)
    assert abs(sf.model_inner(space, t, p)) < 1e-12


def test_normalize_hyperbolic_rejects_spacelike():
    with pytest.raises(DomainError):
        sf.normalize(sf.hyperbolic(2), np.array([0.0, 1.0, 0.0]))


@pytest.mark.parametrize("eps", [1, -1])
def test_orthonormal_complement(eps):
    space = sf.SpaceForm(eps, 4)
    p = space.origin()
    E = sf.orthonormal_complement(space, [p])
    G = (E * space.signature) @ E.T
    assert E.shape == (4, 5)
    assert np.allclose(G, np.eye(4), atol=1e-12)
    assert np.allclose((E * space.signature) @ p, 0.0, atol=1e-12)


def test_hyperbolic_distance_closed_form():
    H = sf.hyperbolic(2)
    x = np.array([math.cosh(1.3), math.sinh(1.3), 0.0])
    assert sf.distance(H, H.origin(), x) == pytest.approx(1.3, abs=1e-12)
