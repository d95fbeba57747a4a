from .gga import (
    HW_EXPONENT,
    AssembledStep,
    BackendFailure,
    HydraulicState,
    IterationRecord,
    LinearSystem,
    SingularSystemError,
    SolverReport,
    assemble_full,
    assemble_step,
    classical_solve,
    estimate_condition,
    headloss,
    headloss_derivative,
    initial_state,
    junction_pressures,
    nr_solve,
    pipe_resistance,
    resistances,
)
from .backends import (
    BACKEND_NAMES,
    BackendSolution,
    ClassicalBackend,
    LinearSolverBackend,
    make_backend,
    solve_truncated,
)

__all__ = [
    "HW_EXPONENT",
    "AssembledStep",
    "BackendFailure",
    "HydraulicState",
    "IterationRecord",
    "LinearSystem",
    "SingularSystemError",
    "SolverReport",
    "assemble_full",
    "assemble_step",
    "classical_solve",
    "estimate_condition",
    "headloss",
    "headloss_derivative",
    "initial_state",
    "junction_pressures",
    "nr_solve",
    "pipe_resistance",
    "resistances",
    "BACKEND_NAMES",
    "BackendSolution",
    "ClassicalBackend",
    "LinearSolverBackend",
    "make_backend",
    "solve_truncated",
]
