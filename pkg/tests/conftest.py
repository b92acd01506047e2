import functools

import numpy as np
import pytest

from umbilic.assemble import assemble
from umbilic.families import equidistant_family, horosphere_family, sphere_family
from umbilic.profile import solve_rho
from umbilic.spaceform import hyperbolic, sphere

FAMILY_NAMES = ("sphere_s", "sphere_h", "horosphere", "equidistant")


def family_for(name: str, n: int):
    if name == "sphere_s":
        return sphere_family(sphere(n))
    if name == "sphere_h":
        return sphere_family(hyperbolic(n))
    if name == "horosphere":
        return horosphere_family(hyperbolic(n))
    if name == "equidistant":
        return equidistant_family(hyperbolic(n))
    raise KeyError(name)


def admissible(name: str, c: float) -> bool:
    return not (name == "equidistant" and c >= 1)


@functools.lru_cache(maxsize=None)
def built(name: str, n: int, c: float):
    """(family, profile, assembly) shared across tests; assembly is None if not gluable."""
    fam = family_for(name, n)
    prof = solve_rho(fam, c)
    return fam, prof, assemble(fam, prof)


@pytest.fixture(params=["numpy", "numba"])
def backend(request, monkeypatch):
    monkeypatch.setenv("UMBILIC_BACKEND", request.param)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
