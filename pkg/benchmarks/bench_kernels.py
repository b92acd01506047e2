"""Time the numpy and numba shape-operator kernels on identical stencils.

    python benchmarks/bench_kernels.py [--samples 2000] [--repeat 5]

The first numba call compiles (or loads the on-disk cache) and is reported
separately from the steady-state timings.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from umbilic.families import sphere_family
from umbilic.kernels import available_backends, chart_shape_operator, flat_shape_operator
from umbilic.profile import solve_rho
from umbilic.spaceform import hyperbolic
from umbilic.surfaces import GraphSurface, WarpedGraphSurface
from umbilic.verify import DEFAULT_STEP, METRIC_STEP_RATIO, _metric_gradient, _stencil
from umbilic.warp import WarpSpec


def flat_inputs(n: int, samples: int):
    space = hyperbolic(n)
    fam = sphere_family(space)
    g = GraphSurface(fam, solve_rho(fam, 0.5))
    u = g.param_grid(samples)
    U = _stencil(u, DEFAULT_STEP)
    return (g.points(U), g.signature, g.quadric_mask, g.reference_normal(U[:, 0, 0]), DEFAULT_STEP)


def chart_inputs(n: int, samples: int):
    space = hyperbolic(n)
    fam = sphere_family(space)
    g = GraphSurface(fam, solve_rho(fam, 0.5))
    W = WarpedGraphSurface(g, WarpSpec("exp-neg"), 1.0, 1.0)
    u = g.param_grid(samples)
    U = _stencil(u, DEFAULT_STEP)
    P = W.coords(U)
    G = W.metric(P[:, :, 0])
    dG = _metric_gradient(W.metric, P[:, 0, 0], DEFAULT_STEP * METRIC_STEP_RATIO)
    return (P, G, dG, W.reference_normal(U[:, 0, 0]), DEFAULT_STEP)


def best_of(fn, args, backend, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args, backend=backend)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--dims", default="2,3")
    args = ap.parse_args(argv)

    backends = available_backends()
    print(f"{'kernel':<8}{'n':>3}{'samples':>9}" + "".join(f"{b:>12}" for b in backends)
          + f"{'speedup':>10}{'max |diff|':>13}")
    for n in (int(v) for v in args.dims.split(",")):
        for name, fn, make in (("flat", flat_shape_operator, flat_inputs),
                               ("chart", chart_shape_operator, chart_inputs)):
            inputs = make(n, args.samples)
            if "numba" in backends:
                t0 = time.perf_counter()
                fn(*inputs, backend="numba")
                print(f"  numba warm-up {name} n={n}: {time.perf_counter() - t0:.2f} s")
            res = {b: best_of(fn, inputs, b, args.repeat) for b in backends}
            row = f"{name:<8}{n:>3}{args.samples:>9}"
            row += "".join(f"{res[b][0] * 1e3:>10.1f}ms" for b in backends)
            if len(backends) == 2:
                speed = res["numpy"][0] / res["numba"][0]
                diff = np.max(np.abs(res["numpy"][1][0] - res["numba"][1][0]))
                row += f"{speed:>9.1f}x{diff:>13.2e}"
            print(row)


if __name__ == "__main__":
    main()
