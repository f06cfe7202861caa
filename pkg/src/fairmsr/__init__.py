"""Constrained Euclidean k-min-sum-radii: approximation scheme and exact oracle."""

from ._kernels import BACKEND
from .constraints import ColorTable, ConstraintSpec, Kind, parse_constraint, satisfies
from .geometry import Ball, PointSet, ResourceError, UsageError, approx_meb, exact_meb
from .kcenter import gonzalez
from .oracle import OracleResult, exact_msr
from .sepbal import Covering, record_guess_string, separate_and_balance
from .solver import SolveOptions, Solution, clustering_search, selection, solve

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Ball", "ColorTable", "ConstraintSpec", "Covering", "Kind", "OracleResult",
    "PointSet", "ResourceError", "SolveOptions", "Solution", "UsageError", "approx_meb",
    "clustering_search", "exact_meb", "exact_msr", "gonzalez", "parse_constraint",
    "record_guess_string", "satisfies", "selection", "separate_and_balance", "solve",
]
