"""Galerkin solver for N-Laplacian Dirichlet problems with exponential
nonlinearity and a gradient (convection) term.

The heavy lifting lives in the compiled extension ``nlapsolve._core``;
this package re-exports its entry points.
"""

from nlapsolve._core import (
    ConfigError,
    alpha_n,
    check,
    constants_report,
    fk_eval,
    mesh_counts,
    solve,
    solve_subsolution,
    sphere_surface_measure,
    xi_norm,
)

__all__ = [
    "ConfigError",
    "alpha_n",
    "check",
    "constants_report",
    "fk_eval",
    "mesh_counts",
    "solve",
    "solve_subsolution",
    "sphere_surface_measure",
    "xi_norm",
]

__version__ = "0.1.0"
