"""Magnetic nonlinear Schrodinger toolkit."""

from ._magnls import (
    Grid,
    InvalidArgument,
    NumericalFailure,
    Params,
    PreconditionRefused,
    classify,
    evolve,
    functionals,
    gaussian,
    ground_state,
    run,
    scaled_soliton,
    set_threads,
    solve_q,
    threads,
    verify,
)

__all__ = [
    "Grid",
    "InvalidArgument",
    "NumericalFailure",
    "Params",
    "PreconditionRefused",
    "classify",
    "evolve",
    "functionals",
    "gaussian",
    "ground_state",
    "run",
    "scaled_soliton",
    "set_threads",
    "solve_q",
    "threads",
    "verify",
]
