"""Newton iteration for steady-state network hydraulics.

Each Newton step eliminates the pipe-flow block and solves the symmetric
junction-head system ``S dH = C - a21 D^-1 E`` where ``S = a21 D^-1 a12``,
``E`` is the per-pipe energy residual, ``C`` the per-junction continuity
residual and ``D`` the diagonal of head-loss derivatives. The linear solve
is pluggable, so the same outer loop runs against the direct classical
solver or any of the emulated quantum backends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
import scipy.linalg

from ..network.model import IncidenceDecomposition, Network, incidence

if TYPE_CHECKING:
    from .backends import LinearSolverBackend

HW_EXPONENT = 1.852
HW_RESISTANCE_COEFF = 10.667  # SI, flow in m^3/s, diameter in m
Q_EPS = 1e-6  # m^3/s, clamp keeping the Jacobian diagonal invertible

DEFAULT_TOL_MASS = 1e-6  # m^3/s
DEFAULT_TOL_ENERGY = 1e-6  # m
DEFAULT_MAX_ITER = 100
INITIAL_VELOCITY = 0.3  # m/s, start-of-iteration pipe velocity guess


class SingularSystemError(RuntimeError):
    """Raised when the junction system cannot be solved directly."""


class BackendFailure(RuntimeError):
    """A linear-solver backend failed; carries the Newton iteration index."""

    def __init__(self, message: str, iteration: int):
        super().__init__(f"{message} (newton iteration {iteration})")
        self.iteration = iteration


def pipe_resistance(length: float, diameter: float, roughness: float,
                    exponent: float = HW_EXPONENT) -> float:
    """Hazen-Williams resistance r such that headloss = r*q*|q|^(n-1)."""
    return HW_RESISTANCE_COEFF * length / (roughness**exponent * diameter**4.871)


def headloss(q: float, r: float, n: float = HW_EXPONENT):
    """Signed head loss r*q*|q|^(n-1); odd and monotone in q."""
    return r * q * np.abs(q) ** (n - 1.0)


def headloss_derivative(q, r, n: float = HW_EXPONENT, q_eps: float = Q_EPS):
    """d(headloss)/dq = n*r*|q|^(n-1), with |q| clamped away from zero."""
    return n * r * np.maximum(np.abs(q), q_eps) ** (n - 1.0)


@dataclass
class HydraulicState:
    """Signed pipe flowrates (m^3/s) and junction heads (m)."""

    q: np.ndarray
    h: np.ndarray

    def copy(self) -> "HydraulicState":
        return HydraulicState(q=self.q.copy(), h=self.h.copy())

    def validate(self, net: Network) -> None:
        if self.q.shape != (net.n_pipes,) or self.h.shape != (net.n_junctions,):
            raise ValueError("state dimensions do not match the network")
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.h))):
            raise ValueError("state contains non-finite entries")


@dataclass
class LinearSystem:
    """One Newton step's symmetric junction-head system."""

    matrix: np.ndarray
    rhs: np.ndarray
    condition_estimate: float = 1.0

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def padded_size(self) -> int:
        return 1 << max(self.size - 1, 0).bit_length() if self.size > 1 else 1

    def padded(self) -> tuple[np.ndarray, np.ndarray]:
        """Copy padded to the next power of two: unit diagonal, zero rhs."""
        m = self.padded_size
        matrix = np.eye(m)
        rhs = np.zeros(m)
        matrix[: self.size, : self.size] = self.matrix
        rhs[: self.size] = self.rhs
        return matrix, rhs


@dataclass
class IterationRecord:
    index: int
    residual_norm: float
    step_norm: float
    condition_estimate: float
    subroutine_diagnostics: dict = field(default_factory=dict)


@dataclass
class SolverReport:
    state: HydraulicState
    iterations: int
    converged: bool
    per_iteration: list[IterationRecord]
    backend: str = "classical"

    def to_log(self) -> str:
        """One iteration per line: index, residual_norm, step_norm, kappa."""
        lines = [
            f"{rec.index} {rec.residual_norm:.9e} {rec.step_norm:.9e} "
            f"{rec.condition_estimate:.9e}"
            for rec in self.per_iteration
        ]
        return "\n".join(lines) + ("\n" if lines else "")


def estimate_condition(matrix: np.ndarray, iters: int = 30) -> float:
    """Power-iteration estimate of kappa(S) = lambda_max / lambda_min.

    Runs power iterations on S and, through an LU factorization, on S^-1.
    Falls back to a Gershgorin bound ratio if S cannot be factorized.
    This is an estimate, not the exact condition number.
    """
    n = matrix.shape[0]
    if n == 1:
        return 1.0

    v = np.ones(n) / math.sqrt(n)
    for _ in range(iters):
        w = matrix @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 1.0
        v = w / norm
    lam_max = float(v @ (matrix @ v))

    try:
        lu, piv = scipy.linalg.lu_factor(matrix)
        v = np.ones(n) / math.sqrt(n)
        for _ in range(iters):
            w = scipy.linalg.lu_solve((lu, piv), v)
            norm = np.linalg.norm(w)
            if norm == 0.0:
                return 1.0
            v = w / norm
        lam_min = float(v @ (matrix @ v))
    except (scipy.linalg.LinAlgError, ValueError):
        diag = np.abs(np.diag(matrix))
        radius = np.sum(np.abs(matrix), axis=1) - diag
        hi = np.max(diag + radius)
        lo = np.min(diag - radius)
        if lo <= 0:
            return max(hi / max(np.min(diag[diag > 0], initial=1.0), 1e-300), 1.0)
        return max(float(hi / lo), 1.0)

    if lam_min <= 0:
        return float("inf")
    return max(lam_max / lam_min, 1.0)


@dataclass
class AssembledStep:
    """Linear system plus the residual pieces the Newton update needs."""

    system: LinearSystem
    energy_residual: np.ndarray  # per pipe, m
    continuity_residual: np.ndarray  # per junction, m^3/s
    d_diag: np.ndarray  # per pipe d(headloss)/dq, clamped


def resistances(net: Network) -> np.ndarray:
    return np.array([pipe_resistance(p.length, p.diameter, p.roughness) for p in net.pipes])


def assemble_full(net: Network, inc: IncidenceDecomposition, state: HydraulicState,
                  exponent: float = HW_EXPONENT) -> AssembledStep:
    state.validate(net)
    r = resistances(net)
    q, h = state.q, state.h
    h0 = net.reservoir_heads()

    energy = headloss(q, r, exponent) + inc.a12 @ h + inc.a10 @ h0
    continuity = inc.a21 @ q - net.demands()
    if not (np.all(np.isfinite(energy)) and np.all(np.isfinite(continuity))):
        raise FloatingPointError("non-finite residual; iteration diverged")

    d = headloss_derivative(q, r, exponent)
    d_inv = 1.0 / d
    s = inc.a21 @ (d_inv[:, None] * inc.a12)
    s = 0.5 * (s + s.T)  # kill round-off asymmetry
    rhs = continuity - inc.a21 @ (d_inv * energy)
    system = LinearSystem(matrix=s, rhs=rhs, condition_estimate=estimate_condition(s))
    return AssembledStep(system=system, energy_residual=energy,
                         continuity_residual=continuity, d_diag=d)


def assemble_step(net: Network, inc: IncidenceDecomposition,
                  state: HydraulicState) -> LinearSystem:
    """Assemble the junction-head system for one Newton step."""
    return assemble_full(net, inc, state).system


def initial_state(net: Network) -> HydraulicState:
    """Velocity-based flow start; flat heads at the mean reservoir head."""
    areas = np.array([math.pi * (p.diameter / 2.0) ** 2 for p in net.pipes])
    q0 = areas * INITIAL_VELOCITY
    h0 = np.full(net.n_junctions, float(np.mean(net.reservoir_heads())))
    return HydraulicState(q=q0, h=h0)


def classical_solve(sys: LinearSystem) -> np.ndarray:
    """Direct dense solve; the reference backend all others are judged by."""
    try:
        x = scipy.linalg.solve(sys.matrix, sys.rhs, assume_a="sym")
    except scipy.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc
    rhs_norm = np.linalg.norm(sys.rhs)
    if rhs_norm > 0:
        rel = np.linalg.norm(sys.matrix @ x - sys.rhs) / rhs_norm
        if not rel < 1e-10:
            raise SingularSystemError(f"direct solve residual {rel:.2e} exceeds 1e-10")
    return x


def nr_solve(net: Network, backend: "LinearSolverBackend | None" = None, *,
             tol_mass: float = DEFAULT_TOL_MASS, tol_energy: float = DEFAULT_TOL_ENERGY,
             max_iter: int = DEFAULT_MAX_ITER, seed: int = 0,
             exponent: float = HW_EXPONENT) -> SolverReport:
    """Run the Newton outer loop against a pluggable linear-solver backend.

    Non-convergence within ``max_iter`` yields a report with
    ``converged=False``; backend failures raise ``BackendFailure`` with the
    iteration index attached.
    """
    from .backends import ClassicalBackend  # late import, avoids cycle

    if backend is None:
        backend = ClassicalBackend()
    inc = incidence(net)
    state = initial_state(net)
    session = backend.session(seed)
    records: list[IterationRecord] = []
    converged = False

    for index in range(max_iter):
        step = assemble_full(net, inc, state, exponent)
        residual_norm = max(
            float(np.max(np.abs(step.continuity_residual), initial=0.0)),
            float(np.max(np.abs(step.energy_residual), initial=0.0)),
        )
        if (np.max(np.abs(step.continuity_residual), initial=0.0) < tol_mass
                and np.max(np.abs(step.energy_residual), initial=0.0) < tol_energy):
            converged = True
            records.append(IterationRecord(
                index=index, residual_norm=residual_norm, step_norm=0.0,
                condition_estimate=step.system.condition_estimate))
            break

        if np.linalg.norm(step.system.rhs) == 0.0:
            dh = np.zeros(step.system.size)
            diagnostics: dict = {"skipped": "zero right-hand side"}
        else:
            try:
                solution = session.solve(step.system)
            except Exception as exc:  # propagate with iteration context
                raise BackendFailure(str(exc), index) from exc
            dh, diagnostics = solution.x, solution.diagnostics

        dq = -(step.energy_residual + inc.a12 @ dh) / step.d_diag
        state = HydraulicState(q=state.q + dq, h=state.h + dh)
        step_norm = max(float(np.max(np.abs(dq), initial=0.0)),
                        float(np.max(np.abs(dh), initial=0.0)))
        records.append(IterationRecord(
            index=index, residual_norm=residual_norm, step_norm=step_norm,
            condition_estimate=step.system.condition_estimate,
            subroutine_diagnostics=diagnostics))

    return SolverReport(state=state, iterations=len(records), converged=converged,
                        per_iteration=records, backend=backend.name)


def junction_pressures(net: Network, state: HydraulicState) -> np.ndarray:
    """Pressure head (m) at each junction: head minus elevation."""
    return state.h - net.elevations()
