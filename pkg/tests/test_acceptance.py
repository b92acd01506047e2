"""Acceptance criteria 1-9.

Each test times itself, asserts both the tolerance and the runtime budget, and
records one line that conftest prints in the terminal summary:

    criterion N: PASS|FAIL  <quantity> = <value> (tol <tol>)  runtime <t> s (budget <b> s)
"""
import math
import time

import numpy as np
import pytest

from umbilic.assemble import (assemble, periodicity_error, reflection_symmetry_error,
                              vertical_diameter)
from umbilic.profile import ode_residual, phi_of, phi_supremum, solve_rho
from umbilic.quadrature import midpoint_rule
from umbilic.spaceform import hyperbolic, sphere
from umbilic.surfaces import (CylinderSurface, GraphSurface, PerturbedSurface, VerticalLeaf,
                              WarpedGraphSurface)
from umbilic.verify import convergence_ratio, shape_operator_flat, umbilicity_report
from umbilic.warp import Topology, WarpSpec, classify_warped, parse_omega, product_shift

from conftest import FAMILY_NAMES, admissible, family_for

RESULTS: dict[int, str] = {}


class Criterion:
    """Context manager: time a block, then record and assert the outcome."""

    def __init__(self, number: int, budget: float):
        self.number, self.budget = number, budget
        self.checks = []

    def check(self, label: str, value: float, tol: float, ok: bool):
        self.checks.append((label, value, tol, bool(ok)))

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        ok = exc_type is None and all(c[3] for c in self.checks) and elapsed < self.budget
        parts = [f"{label} = {value:.3e} (tol {tol:.1e})" for label, value, tol, _ in self.checks]
        if exc_type is not None:
            parts.append(f"error {exc_type.__name__}: {exc}")
        RESULTS[self.number] = (f"criterion {self.number}: {'PASS' if ok else 'FAIL'}  "
                                + "; ".join(parts)
                                + f"  runtime {elapsed:.2f} s (budget {self.budget:g} s)")
        if exc_type is None:
            failed = [c[0] for c in self.checks if not c[3]]
            assert not failed, RESULTS[self.number]
            assert elapsed < self.budget, RESULTS[self.number]
        return False


def test_criterion_1_unit_sphere_profile():
    with Criterion(1, 1.0) as cr:
        prof = solve_rho(family_for("sphere_s", 2), 1.0)
        s = np.linspace(0.0, 1.4, 200)
        err = float(np.max(np.abs(phi_of(prof, s) - np.log(1 / np.cos(s)))))
        cr.check("max |phi - log sec s|", err, 1e-8, err <= 1e-8)


def test_criterion_2_horosphere_profile():
    with Criterion(2, 1.0) as cr:
        prof = solve_rho(family_for("horosphere", 2), 1.0)
        s = np.linspace(0.01, 10.0, 200)
        phi = phi_of(prof, s)
        err = float(np.max(np.abs(phi - (0.5 * math.pi - np.arcsin(np.exp(-s))))))
        cr.check("max |phi - (pi/2 - asin e^-s)|", err, 1e-8, err <= 1e-8)
        gap = 0.5 * math.pi - float(np.max(phi))
        cr.check("pi/2 - max phi", gap, 0.0, gap > 0)
        cr.check("|sup phi - pi/2|", abs(phi_supremum(prof) - 0.5 * math.pi), 1e-12,
                 abs(phi_supremum(prof) - 0.5 * math.pi) <= 1e-12)


def test_criterion_3_ode_residual():
    with Criterion(3, 5.0) as cr:
        worst, cases = 0.0, 0
        for name in FAMILY_NAMES:
            for c in (0.3, 0.5, 1.0, 2.0):
                if not admissible(name, c):
                    continue
                prof = solve_rho(family_for(name, 2), c)
                s = prof.sample_s(1002)[1:-1]
                worst = max(worst, float(np.max(ode_residual(prof, s))))
                cases += 1
        cr.check(f"max |rho' + lambda rho| over {cases} profiles", worst, 1e-8, worst <= 1e-8)


def test_criterion_4_flat_oracle():
    with Criterion(4, 60.0) as cr:
        spread = mean_err = 0.0
        r_lo, r_hi = math.inf, -math.inf
        n_min = math.inf
        for name in FAMILY_NAMES:
            for n in (2, 3):
                for c in (0.5, 2.0):
                    if not admissible(name, c):
                        continue
                    fam = family_for(name, n)
                    prof = solve_rho(fam, c)
                    g = GraphSurface(fam, prof)
                    u = g.param_grid(240)
                    r = umbilicity_report(g, u, h=1e-3, tol=1e-4)
                    spread = max(spread, r.max_spread)
                    kept = np.array([smp["params"] for smp in r.samples])
                    s = g._arrays(kept)[0]
                    mean = np.array([smp["mean"] for smp in r.samples])
                    exact = -prof.rho(s) * prof.lam(s)
                    mean_err = max(mean_err, float(np.max(np.abs(mean - exact))))
                    n_min = min(n_min, r.n_samples)
                    ratio = convergence_ratio(g, u, h=1e-3)
                    r_lo, r_hi = min(r_lo, ratio), max(r_hi, ratio)
        cr.check("min interior samples", n_min, 200, n_min >= 200)
        cr.check("max spread", spread, 1e-4, spread <= 1e-4)
        cr.check("max |mean + rho lambda|", mean_err, 1e-5, mean_err <= 1e-5)
        cr.check("min halving ratio", r_lo, 3.2, r_lo >= 3.2)
        cr.check("max halving ratio", r_hi, 4.8, r_hi <= 4.8)


def test_criterion_5_vertical_diameter():
    with Criterion(5, 1.0) as cr:
        fam = family_for("sphere_s", 2)
        h = assemble(fam, solve_rho(fam, 2.0))
        # independent oracle: half diameter = int rho / sqrt(1 - rho^2) ds with
        # rho = 2 sin s on [0, pi/6]; u = rho and 1 - u = v^2 give a smooth integrand
        def f(v):
            u = 1 - v * v
            return 2 * u / np.sqrt((1 + u) * (4 - u * u))

        oracle = 2 * midpoint_rule(f, 0.0, 1.0, 200000)
        diam = vertical_diameter(h)
        closed = 2 * math.acosh(2 / math.sqrt(3))
        cr.check("|diameter - 2 acosh(2/sqrt 3)|", abs(diam - closed), 1e-7,
                 abs(diam - closed) <= 1e-7)
        cr.check("|diameter - midpoint oracle|", abs(diam - oracle), 1e-7,
                 abs(diam - oracle) <= 1e-7)


def test_criterion_6_symmetry_and_period():
    with Criterion(6, 5.0) as cr:
        refl = 0.0
        for name in ("sphere_s", "sphere_h"):
            for c in (0.5, 1.0, 2.0):
                fam = family_for(name, 2)
                h = assemble(fam, solve_rho(fam, c))
                if h.symmetry_planes:
                    refl = max(refl, reflection_symmetry_error(h))
        per = 0.0
        for c in (0.3, 0.5):
            fam = family_for("equidistant", 2)
            per = max(per, periodicity_error(assemble(fam, solve_rho(fam, c))))
        cr.check("reflection error", refl, 1e-9, refl <= 1e-9)
        cr.check("periodicity error", per, 1e-9, per <= 1e-9)


def test_criterion_7_totally_geodesic():
    with Criterion(7, 10.0) as cr:
        fam = family_for("equidistant", 3)
        cyl = CylinderSurface(fam, 0.0)
        r = umbilicity_report(cyl, cyl.param_grid(200), tol=1e-6)
        cr.check("cylinder max |eig|", r.max_abs_curvature, 1e-6, r.max_abs_curvature <= 1e-6)
        cr.check("cylinder Theta range", r.theta_range, 0.0, r.theta_range <= 1e-12)
        theta_min = k_min = math.inf
        for name in FAMILY_NAMES:
            for c in (0.3, 0.5, 1.0, 2.0):
                if not admissible(name, c):
                    continue
                fam = family_for(name, 2)
                g = GraphSurface(fam, solve_rho(fam, c))
                rep = umbilicity_report(g, g.param_grid(200), tol=1e-4)
                theta_min = min(theta_min, rep.theta_range)
                k_min = min(k_min, rep.max_abs_curvature)
        cr.check("min graph Theta range", theta_min, 1e-3, theta_min > 1e-3)
        cr.check("min graph max |k|", k_min, 1e-3, k_min > 1e-3)


def _warped_spread(name, c, warp):
    fam = family_for(name, 2)
    prof = solve_rho(fam, c)
    h = assemble(fam, prof, k_range=(0, 1))
    g = GraphSurface(fam, prof)
    shift = product_shift(warp, h)
    u = g.param_grid(120)
    worst = 0.0
    for p in h.pieces:
        W = WarpedGraphSurface(g, warp, p.sigma, p.tau + shift)
        uu = u[W.inside(u)]
        if len(uu):
            worst = max(worst, umbilicity_report(W, uu, tol=1e-4).max_spread)
    return worst


def test_criterion_8_warped_transfer():
    with Criterion(8, 60.0) as cr:
        warps = {"t": WarpSpec("t"), "exp-neg": WarpSpec("exp-neg"), "const": WarpSpec("const")}
        spread = 0.0
        for warp in warps.values():
            for name, c in (("sphere_s", 2.0), ("sphere_h", 0.5), ("horosphere", 1.0),
                            ("equidistant", 0.5)):
                spread = max(spread, _warped_spread(name, c, warp))
        cr.check("max chart-oracle spread", spread, 1e-4, spread <= 1e-4)

        leaf_err = 0.0
        for warp in warps.values():
            for space in (sphere(2), hyperbolic(2)):
                t0 = 0.8
                leaf = VerticalLeaf(warp, space, t0)
                r = umbilicity_report(leaf, leaf.param_grid(40), tol=1e-4)
                exact = float(warp.domega(np.array(t0)) / warp.omega(np.array(t0)))
                eig = np.array([s["eigenvalues"] for s in r.samples])
                leaf_err = max(leaf_err, float(np.max(np.abs(eig - exact))))
        cr.check("max |leaf eig - omega'/omega|", leaf_err, 1e-4, leaf_err <= 1e-4)

        labels_ok = True
        for warp in (WarpSpec("t"), WarpSpec("exp-neg")):
            for name, c in (("sphere_s", 2.0), ("sphere_h", 0.5)):
                fam = family_for(name, 2)
                cls = classify_warped(warp, assemble(fam, solve_rho(fam, c)))
                labels_ok &= cls.topology is Topology.SPHERE and cls.complete
        fam = family_for("sphere_s", 2)
        h = assemble(fam, solve_rho(fam, 2.0))
        delta = 0.4 * h.vertical_diameter
        cls = classify_warped(parse_omega("const:1", delta), h)
        labels_ok &= cls.topology is Topology.ANNULUS
        cr.check("classification mismatches", 0.0 if labels_ok else 1.0, 0.0, labels_ok)


def test_criterion_9_perturbation_detected():
    with Criterion(9, 5.0) as cr:
        worst = math.inf
        for name, c in (("sphere_s", 2.0), ("sphere_h", 0.5), ("horosphere", 1.0),
                        ("equidistant", 0.5)):
            fam = family_for(name, 2)
            g = PerturbedSurface(GraphSurface(fam, solve_rho(fam, c)), 0.01)
            r = umbilicity_report(g, g.param_grid(200), tol=1e-4)
            worst = min(worst, r.max_spread)
        cr.check("min spread of 1% perturbation", worst, 1e-3, worst > 1e-3)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
