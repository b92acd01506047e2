"""Totally umbilical hypersurfaces of Q^n_eps x R and their warped transfers."""
from .assemble import AssembledHypersurface, Topology, SymmetryClass, assemble, vertical_diameter
from .errors import (AssemblyError, DomainError, EmptySlabError, OracleError, QuadratureError,
                     UmbilicError)
from .families import (FamilyKind, FamilySpec, custom_family, equidistant_family, eval_family,
                       horosphere_family, make_family, sphere_family)
from .graph import eval_graph, graph_arrays
from .profile import Profile, solve_rho
from .spaceform import SpaceForm, hyperbolic, sphere
from .surfaces import GraphSurface, WarpedGraphSurface
from .verify import shape_operator_chart, shape_operator_flat, umbilicity_report
from .warp import WarpSpec, classify_warped, parse_omega, pull_back

__version__ = "0.1.0"

__all__ = [
    "AssembledHypersurface", "Topology", "SymmetryClass", "assemble", "vertical_diameter",
    "AssemblyError", "DomainError", "EmptySlabError", "OracleError", "QuadratureError",
    "UmbilicError", "FamilyKind", "FamilySpec", "custom_family", "equidistant_family",
    "eval_family", "horosphere_family", "make_family", "sphere_family", "eval_graph",
    "graph_arrays", "Profile", "solve_rho", "SpaceForm", "hyperbolic", "sphere",
    "GraphSurface", "WarpedGraphSurface", "shape_operator_chart", "shape_operator_flat",
    "umbilicity_report", "WarpSpec", "classify_warped", "parse_omega", "pull_back",
]
