import numpy as np
import pytest

from umbilic.assemble import assemble
from umbilic.surfaces import GraphSurface, WarpedGraphSurface
from umbilic.verify import umbilicity_report
from umbilic.warp import WarpSpec, parse_omega, product_shift

from conftest import FAMILY_NAMES, built

WARPS = {"t": lambda: WarpSpec("t"), "exp-neg": lambda: WarpSpec("exp-neg"),
         "const:1": lambda: WarpSpec("const"), "const:2": lambda: parse_omega("const:2"),
         "cosh": lambda: WarpSpec("cosh")}
C_OF = {"sphere_s": 2.0, "sphere_h": 0.5, "horosphere": 1.0, "equidistant": 0.5}


def warped_pieces(name, n, warp):
    fam, prof, _ = built(name, n, C_OF[name])
    # one period of the equidistant assembly is enough
    h = assemble(fam, prof, k_range=(0, 1))
    g = GraphSurface(fam, prof)
    shift = product_shift(warp, h)
    return g, [WarpedGraphSurface(g, warp, p.sigma, p.tau + shift) for p in h.pieces]


@pytest.mark.parametrize("omega", sorted(WARPS))
@pytest.mark.parametrize("name", FAMILY_NAMES)
@pytest.mark.parametrize("n", [2, 3])
def test_pulled_back_graph_umbilic(omega, name, n):
    warp = WARPS[omega]()
    g, pieces = warped_pieces(name, n, warp)
    u = g.param_grid(120)
    checked = 0
    for W in pieces:
        uu = u[W.inside(u)]
        if len(uu) == 0:
            continue
        r = umbilicity_report(W, uu, tol=1e-4)
        assert r.oracle == "chart"
        assert r.passed, r.summary()
        checked += r.n_samples
    assert checked > 0


def test_transferred_value_formula():
    """The chart oracle reproduces (lambda - b omega') / omega pointwise."""
    warp = WarpSpec("exp-neg")
    g, pieces = warped_pieces("sphere_h", 2, warp)
    W = pieces[1]
    u = g.param_grid(40)
    r = umbilicity_report(W, u, tol=1e-4)
    means = np.array([s["mean"] for s in r.samples])
    assert np.max(np.abs(means - W.analytic(u))) <= 1e-5


def test_inside_mask():
    warp = parse_omega("const:1", 0.3)
    g, pieces = warped_pieces("sphere_s", 2, warp)
    u = g.param_grid(100)
    mask = pieces[0].inside(u)
    assert mask.any() and not mask.all()
