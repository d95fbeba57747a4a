"""Linear-solver backend contract used by the Newton outer loop.

A backend produces per-run sessions so that state like warm-start angles
or a frozen phase-estimation configuration stays private to one solver
run; backend objects themselves hold only configuration and are safe to
share across concurrent runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .gga import LinearSystem, classical_solve

BACKEND_NAMES = ("classical", "vqls", "hhl", "qubols")


@dataclass
class BackendSolution:
    x: np.ndarray
    diagnostics: dict = field(default_factory=dict)


class SolverSession(Protocol):
    def solve(self, system: LinearSystem) -> BackendSolution: ...


class LinearSolverBackend(Protocol):
    name: str

    def session(self, seed: int) -> SolverSession: ...


class ClassicalBackend:
    """Direct dense solve; the reference every quantum backend is scored against."""

    name = "classical"

    def session(self, seed: int = 0) -> "ClassicalBackend":
        return self

    def solve(self, system: LinearSystem) -> BackendSolution:
        return BackendSolution(x=classical_solve(system))


def solve_truncated(system: LinearSystem, solve_padded) -> np.ndarray:
    """Normalize, pad to a power of two, solve, and truncate back.

    The matrix is scaled by its largest diagonal entry before unit-diagonal
    padding so the padding block sits inside the true spectrum's magnitude
    range; the scaling cancels out of the returned solution. Conditioning
    is unaffected, so backends sensitive to it still see the real thing.
    """
    scale = float(np.max(np.abs(np.diag(system.matrix))))
    if scale == 0.0:
        scale = 1.0
    matrix, rhs = LinearSystem(system.matrix / scale, system.rhs,
                               system.condition_estimate).padded()
    x = solve_padded(matrix, rhs)
    return np.asarray(x)[: system.size] / scale


def make_backend(name: str, **opts) -> LinearSolverBackend:
    """Build a backend by CLI/service name."""
    if name == "classical":
        return ClassicalBackend()
    if name == "vqls":
        from ..solvers.vqls import VqlsBackend

        return VqlsBackend(**opts)
    if name == "hhl":
        from ..solvers.hhl import HhlBackend

        return HhlBackend(**opts)
    if name == "qubols":
        from ..qubo.linear import QubolsBackend

        return QubolsBackend(**opts)
    raise ValueError(f"unknown backend {name!r}; expected one of {BACKEND_NAMES}")
