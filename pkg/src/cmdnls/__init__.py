"""Spectral solver and explicit-formula evaluator for the defocusing Calogero-Moser
derivative NLS with unit-modulus background."""

from .grid import Field, GridSpec, HardyField, make_grid, poisson_eval, szego_project
from .data import InitialDatum, build_datum, catalog
from .evolve import SolverConfig, Trajectory, evolve
from .formula import FormulaWorkspace, explicit_eval, explicit_eval_iplus

__all__ = [
    "Field",
    "GridSpec",
    "HardyField",
    "make_grid",
    "poisson_eval",
    "szego_project",
    "InitialDatum",
    "build_datum",
    "catalog",
    "SolverConfig",
    "Trajectory",
    "evolve",
    "FormulaWorkspace",
    "explicit_eval",
    "explicit_eval_iplus",
]
