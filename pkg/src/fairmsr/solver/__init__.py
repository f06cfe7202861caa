"""Selection, the guess-string search and the top-level solver."""

from .search import (Branch, SolveOptions, Solution, clustering_search, enumerate_branches,
                     guarantee_factor, solve, working_eps)
from .selection import (SelectionResult, assignment, balls_to_partition, cluster_cap,
                        exclusion_radius, gamma_of, selection)

__all__ = [
    "Branch", "SelectionResult", "SolveOptions", "Solution", "assignment",
    "balls_to_partition", "cluster_cap", "clustering_search", "enumerate_branches",
    "exclusion_radius", "gamma_of", "guarantee_factor", "selection", "solve", "working_eps",
]
