"""Command-line front end: ``umbilic {profile,build,verify,warp,classify}``.

Exit codes: 0 ok, 1 verification failed, 2 invalid arguments, 3 quadrature
failure, 4 empty slab intersection, 5 oracle breakdown.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from .assemble import assemble
from .errors import AssemblyError, DomainError, EmptySlabError, OracleError, QuadratureError
from .export import export_build, metadata, write_json, write_warped_csv
from .families import FamilyKind, custom_family, load_lambda_table, make_family
from .profile import solve_rho, write_profile_csv
from .spaceform import SpaceForm
from .surfaces import CylinderSurface, GraphSurface, PerturbedSurface
from .verify import DEFAULT_STEP, umbilicity_report
from .warp import classify_warped, parse_omega, pull_back

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_QUADRATURE = 3
EXIT_EMPTY_SLAB = 4
EXIT_ORACLE = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# argument groups ------------------------------------------------------------------

def _geometry(p):
    p.add_argument("--space", choices=("s", "h"), default="s", help="S^n (s) or H^n (h)")
    p.add_argument("--family", default="sphere",
                   choices=("sphere", "horosphere", "equidistant", "custom"))
    p.add_argument("--c", type=float, default=1.0, help="initial value rho(s_min) or rho(a)")
    p.add_argument("--dim", type=int, default=2, help="dimension n of the space form")
    p.add_argument("--lambda-table", default=None, help="s,lambda CSV for --family custom")
    p.add_argument("--box", type=float, default=3.0, help="half width L of flat chart boxes")
    p.add_argument("--config", default=None, help="key=value file overriding defaults")


def _grid(p):
    p.add_argument("--n-q", type=int, default=41, help="profile samples per piece")
    p.add_argument("--n-chart", type=int, default=24, help="samples per chart coordinate")
    p.add_argument("--k-range", default="-2,2", help="reflected copies lo,hi (equidistant)")


def _warp_args(p, required: bool):
    p.add_argument("--omega", required=required, default=None,
                   help="t | exp-neg | cosh | const:k | table:path.csv")
    p.add_argument("--delta", type=float, default=None, help="half width of J for const warps")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="umbilic", description="Totally umbilical hypersurfaces of Q^n x R.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("profile", help="write the rho/phi profile as CSV")
    _geometry(p)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--out", required=True)

    p = sub.add_parser("build", help="assemble and export mesh, cloud and metadata")
    _geometry(p)
    _grid(p)
    p.add_argument("--out", required=True, help="output prefix")

    p = sub.add_parser("verify", help="run the umbilicity oracle")
    _geometry(p)
    p.add_argument("--in", dest="source", default=None,
                   help="metadata JSON written by build; replaces the geometry flags")
    p.add_argument("--surface", choices=("graph", "cylinder"), default="graph",
                   help="graph of the profile or vertical cylinder over the leaf s = 0")
    p.add_argument("--perturb", type=float, default=0.0, help="height perturbation amplitude")
    p.add_argument("--h", type=float, default=DEFAULT_STEP)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--out", default=None, help="report JSON path")

    p = sub.add_parser("warp", help="transfer into a warped product and classify")
    _geometry(p)
    _grid(p)
    _warp_args(p, required=True)
    p.add_argument("--out", required=True, help="output prefix")

    p = sub.add_parser("classify", help="topology and completeness labels")
    _geometry(p)
    p.add_argument("--k-range", default="-2,2")
    _warp_args(p, required=False)
    return parser


# config files ---------------------------------------------------------------------

def read_config(path) -> dict[str, str]:
    """key=value lines; blank lines and '#' comments are skipped."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for num, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{num}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _subparser(parser, name):
    for action in parser._subparsers._group_actions:
        return action.choices[name]
    raise UsageError(f"unknown command {name}")


def _config_path(argv):
    """Command name and --config value, read ahead of the full parse."""
    command = next((a for a in argv if not a.startswith("-")), None)
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            return command, argv[i + 1]
        if a.startswith("--config="):
            return command, a.split("=", 1)[1]
    return command, None


def parse_args(argv) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    command, config = _config_path(argv)
    if config is not None and command in COMMANDS:
        sub = _subparser(parser, command)
        known = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
        defaults = {}
        for key, raw in read_config(config).items():
            if key not in known:
                raise UsageError(f"unknown config key {key!r} for {command}")
            action = known[key]
            try:
                val = action.type(raw) if action.type else raw
            except ValueError as exc:
                raise UsageError(f"config key {key}: {exc}") from exc
            if action.choices is not None and val not in action.choices:
                raise UsageError(f"config key {key}: {val!r} not in {list(action.choices)}")
            defaults[key] = val
        sub.set_defaults(**defaults)
        for action in sub._actions:
            if action.dest in defaults:
                action.required = False
    return parser.parse_args(argv)


# shared construction --------------------------------------------------------------

def _space(args) -> SpaceForm:
    return SpaceForm(1 if args.space == "s" else -1, args.dim)


def _family(args):
    space = _space(args)
    if args.family == "custom":
        if not args.lambda_table:
            raise DomainError("--family custom needs --lambda-table")
        s, lam = load_lambda_table(args.lambda_table)
        return custom_family(space, s, lam)
    if args.lambda_table:
        raise DomainError("--lambda-table only applies to --family custom")
    fam = make_family(space, args.family)
    if fam.kind in (FamilyKind.HOROSPHERE, FamilyKind.EQUIDISTANT):
        if not args.box > 0:
            raise DomainError(f"--box must be positive, got {args.box}")
        fam = dataclasses.replace(fam, box_half_width=float(args.box))
    return fam


def _k_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(v) for v in text.split(","))
    except ValueError as exc:
        raise DomainError(f"--k-range must be 'lo,hi', got {text!r}") from exc
    return lo, hi


def _check_grid(args):
    if args.n_q < 2 or args.n_chart < 2:
        raise DomainError("--n-q and --n-chart must be at least 2")


def _profile(args):
    if not args.c > 0 or not math.isfinite(args.c):
        raise DomainError(f"--c must be a positive number, got {args.c}")
    fam = _family(args)
    return fam, solve_rho(fam, args.c)


def _assembly(args):
    fam, prof = _profile(args)
    return assemble(fam, prof, k_range=_k_range(args.k_range))


def _build_record(args) -> dict:
    return {"space": args.space, "family": args.family, "c": args.c, "dim": args.dim,
            "box": args.box}


def _emit(data: dict):
    from .export import _json_ready

    print(json.dumps(_json_ready(data), indent=2, sort_keys=True))


# commands -------------------------------------------------------------------------

def cmd_profile(args) -> int:
    if args.samples < 2:
        raise DomainError("--samples must be at least 2")
    _, prof = _profile(args)
    write_profile_csv(prof, args.samples, args.out)
    return EXIT_OK


def cmd_build(args) -> int:
    _check_grid(args)
    h = _assembly(args)
    paths = export_build(h, args.out, args.n_q, args.n_chart)
    meta = metadata(h)
    meta["build"] = _build_record(args)
    write_json(meta, paths["metadata"])
    _emit(meta)
    return EXIT_OK


def _load_build(args):
    try:
        data = json.loads(Path(args.source).read_text())
    except (OSError, ValueError) as exc:
        raise DomainError(f"cannot read build metadata {args.source}: {exc}") from exc
    rec = data.get("build")
    if not isinstance(rec, dict):
        raise DomainError(f"{args.source} has no build record")
    args.space, args.family = rec["space"], rec["family"]
    args.c, args.dim, args.box = float(rec["c"]), int(rec["dim"]), float(rec["box"])


def cmd_verify(args) -> int:
    if args.source:
        _load_build(args)
    if args.samples < 1 or not args.h > 0 or not args.tol > 0:
        raise DomainError("--samples, --h and --tol must be positive")
    if args.surface == "cylinder":
        fam = _family(args)
        surface = CylinderSurface(fam, 0.0)
    else:
        fam, prof = _profile(args)
        surface = GraphSurface(fam, prof)
        if args.perturb:
            surface = PerturbedSurface(surface, args.perturb)
    report = umbilicity_report(surface, surface.param_grid(args.samples), args.h, args.tol)
    summary = report.summary()
    summary["max_abs_curvature"] = report.max_abs_curvature
    if args.out:
        write_json(summary, args.out)
    _emit(summary)
    return EXIT_OK if report.passed else EXIT_FAILED


def _warp_spec(args):
    if args.delta is not None and not args.delta > 0:
        raise DomainError(f"--delta must be positive, got {args.delta}")
    return parse_omega(args.omega, args.delta)


def _classification(spec, h) -> dict:
    cls = classify_warped(spec, h).as_dict()
    cls["delta"] = spec.delta
    return cls


def cmd_warp(args) -> int:
    _check_grid(args)
    spec = _warp_spec(args)
    h = _assembly(args)
    warped = pull_back(spec, h, n_q=args.n_q, n_chart=args.n_chart)
    prefix = Path(args.out)
    write_warped_csv(warped, prefix.with_suffix(".csv"))
    info = _classification(spec, h)
    info.update({"omega": spec.kind.value, "offset": warped.offset,
                 "kept": warped.kept, "dropped": warped.dropped})
    write_json(info, prefix.with_suffix(".json"))
    _emit(info)
    return EXIT_OK


def cmd_classify(args) -> int:
    h = _assembly(args)
    out = {"product": metadata(h)}
    if args.omega:
        out["warped"] = _classification(_warp_spec(args), h)
    elif args.delta is not None:
        raise DomainError("--delta needs --omega")
    _emit(out)
    return EXIT_OK


COMMANDS = {"profile": cmd_profile, "build": cmd_build, "verify": cmd_verify,
            "warp": cmd_warp, "classify": cmd_classify}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"umbilic: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, AssemblyError) as exc:
        print(f"umbilic: invalid arguments: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureError as exc:
        print(f"umbilic: quadrature failed: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    except EmptySlabError as exc:
        print(f"umbilic: empty slab: {exc}", file=sys.stderr)
        return EXIT_EMPTY_SLAB
    except OracleError as exc:
        print(f"umbilic: oracle failed: {exc}", file=sys.stderr)
        return EXIT_ORACLE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
