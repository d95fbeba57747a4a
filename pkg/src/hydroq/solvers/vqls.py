"""Variational solver for real symmetric linear systems on the emulator.

The system matrix is expanded in the Pauli basis, a trial state is
prepared by a layered RY + CNOT-chain circuit, and the gate angles are
tuned by a derivative-free simplex search of the global overlap cost
``C = 1 - |<b|A x(theta)>|^2 / ||A x(theta)>||^2``. The cost is evaluated
directly from exact emulator amplitudes; the Hadamard-test circuits a
hardware run would use add nothing measurable at this register size.
A closed-form scale factor turns the unit trial state into the solution.

The entangler is a CNOT chain rather than a CZ chain: the orbit of |0..0>
under RY rows with CZ chains is a strict submanifold of the real sphere
(one direction short), so generic targets are unreachable; CNOT chains
have no such defect.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.optimize

from ..emulator.statevector import Circuit, QuantumState, run
from ..hydraulics.backends import BackendSolution, solve_truncated
from ..hydraulics.gga import LinearSystem

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
COEFF_DROP_TOL = 1e-12

DEFAULT_LAYERS = 4
DEFAULT_MAX_EVALS = 4000
DEFAULT_RESTARTS = 5
DEFAULT_COST_TOL = 1e-8


class DegenerateCostError(ValueError):
    """A x(theta) vanished numerically; the cost is undefined there."""


@lru_cache(maxsize=8)
def _pauli_basis(n_qubits: int) -> tuple[tuple[str, ...], np.ndarray]:
    """All 4^n Pauli words and their matrices, qubit 0 = last character."""
    words = []
    mats = []
    for letters in itertools.product("IXYZ", repeat=n_qubits):
        word = "".join(letters)
        mat = PAULI_MATRICES[letters[0]]
        for ch in letters[1:]:
            mat = np.kron(mat, PAULI_MATRICES[ch])
        words.append(word)
        mats.append(mat)
    return tuple(words), np.array(mats)


@dataclass(frozen=True)
class PauliDecomposition:
    """Real-coefficient Pauli expansion of a real symmetric matrix."""

    n_qubits: int
    terms: tuple[tuple[float, str], ...]

    def matrix(self) -> np.ndarray:
        words, mats = _pauli_basis(self.n_qubits)
        index = {w: k for k, w in enumerate(words)}
        total = np.zeros((2**self.n_qubits, 2**self.n_qubits), dtype=complex)
        for coeff, word in self.terms:
            total += coeff * mats[index[word]]
        return total.real.copy()


def pauli_decompose(matrix: np.ndarray) -> PauliDecomposition:
    """Expand a real symmetric matrix over Pauli words, dropping ~0 terms.

    Words with an odd number of Y factors are imaginary-antisymmetric,
    so their coefficients vanish for valid input; a nonzero one means the
    matrix was not real symmetric and is reported as an error. Even-Y
    words are real symmetric and legitimately appear.
    """
    matrix = np.asarray(matrix, dtype=float)
    dim = matrix.shape[0]
    n = int(np.log2(dim))
    if 2**n != dim or matrix.ndim != 2 or matrix.shape != (dim, dim):
        raise ValueError("matrix must be square with power-of-two size")
    scale = max(float(np.max(np.abs(matrix))), 1.0)
    words, mats = _pauli_basis(n)
    coeffs = np.einsum("kij,ji->k", mats, matrix.astype(complex)) / dim
    terms = []
    for word, coeff in zip(words, coeffs):
        if abs(coeff.imag) > 1e-10 * scale:
            raise ValueError(
                f"term {word} has imaginary coefficient {coeff.imag:.3e}; "
                "input is not real symmetric")
        odd_y = word.count("Y") % 2 == 1
        if odd_y and abs(coeff) > 1e-10 * scale:
            raise ValueError(
                f"odd-Y term {word} has coefficient {coeff.real:.3e}; "
                "input is not real symmetric")
        if not odd_y and abs(coeff.real) > COEFF_DROP_TOL:
            terms.append((float(coeff.real), word))
    return PauliDecomposition(n_qubits=n, terms=tuple(terms))


@dataclass(frozen=True)
class Ansatz:
    """Layered RY rows with a linear CNOT chain between consecutive rows."""

    n_qubits: int
    layers: int

    @property
    def n_parameters(self) -> int:
        return self.n_qubits * self.layers

    def circuit(self, theta: np.ndarray) -> Circuit:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_parameters,):
            raise ValueError(f"expected {self.n_parameters} parameters")
        circ = Circuit(self.n_qubits)
        k = 0
        for layer in range(self.layers):
            if layer > 0:
                for q in range(self.n_qubits - 1):
                    circ.cnot(q, q + 1)
            for q in range(self.n_qubits):
                circ.ry(q, theta[k])
                k += 1
        return circ

    def state(self, theta: np.ndarray) -> QuantumState:
        return run(self.circuit(theta))


def ansatz_amplitudes(ansatz: Ansatz, theta: np.ndarray) -> np.ndarray:
    """Real amplitude vector of the ansatz state.

    Tight-loop equivalent of ``run(ansatz.circuit(theta))`` (RY and CNOT
    keep amplitudes real); tested to agree with it to machine precision.
    """
    n = ansatz.n_qubits
    vec = np.zeros(2**n)
    vec[0] = 1.0
    tensor = vec.reshape((2,) * n)
    half = np.asarray(theta, dtype=float) / 2.0
    k = 0
    for layer in range(ansatz.layers):
        if layer > 0:
            for q in range(n - 1):
                # CNOT with control q, target q+1
                view = np.moveaxis(tensor, [n - 1 - q, n - 2 - q], [0, 1])
                view[1] = view[1, ::-1].copy()
        for q in range(n):
            view = np.moveaxis(tensor, n - 1 - q, 0)
            a = view[0].copy()
            b = view[1]
            c, s = np.cos(half[k]), np.sin(half[k])
            view[0] = c * a - s * b
            view[1] = s * a + c * b
            k += 1
    return tensor.reshape(-1)


def cost(decomp: PauliDecomposition, b_state: QuantumState, ansatz: Ansatz,
         theta: np.ndarray) -> float:
    """Global overlap cost, 0 when A x(theta) is parallel to b, 1 when orthogonal."""
    if decomp.n_qubits != b_state.n_qubits or ansatz.n_qubits != b_state.n_qubits:
        raise ValueError("decomposition, right-hand side and ansatz sizes differ")
    return _cost_raw(decomp.matrix(), b_state.amplitudes, ansatz, theta)


def _cost_raw(matrix: np.ndarray, b_amplitudes: np.ndarray, ansatz: Ansatz,
              theta: np.ndarray) -> float:
    x = ansatz_amplitudes(ansatz, theta)
    w = matrix @ x
    w_sq = float(w @ w)
    if w_sq < 1e-280:
        raise DegenerateCostError("A|x(theta)> is numerically zero")
    overlap = np.vdot(b_amplitudes, w)
    value = 1.0 - (abs(overlap) ** 2) / (w_sq * float(np.vdot(b_amplitudes, b_amplitudes).real))
    return float(min(max(value, 0.0), 1.0))


def recover_scale(matrix: np.ndarray, v: np.ndarray, rhs: np.ndarray) -> float:
    """Least-squares scalar alpha minimizing ||A(alpha v) - rhs||."""
    av = matrix @ v
    denom = float(av @ av)
    if denom == 0.0:
        return 0.0
    return float(av @ rhs) / denom


class _ToleranceReached(Exception):
    pass


@dataclass
class VqlsResult:
    solution: np.ndarray
    final_cost: float
    evals: int
    restarts_used: int
    reached_tol: bool
    theta: np.ndarray

    def diagnostics(self) -> dict:
        return {
            "final_cost": self.final_cost,
            "evals": self.evals,
            "restarts_used": self.restarts_used,
            "reached_tol": self.reached_tol,
        }


def vqls_solve(sys: LinearSystem, *, layers: int = DEFAULT_LAYERS,
               max_evals: int = DEFAULT_MAX_EVALS, restarts: int = DEFAULT_RESTARTS,
               cost_tol: float = DEFAULT_COST_TOL, seed: int = 0,
               init_theta: np.ndarray | None = None) -> VqlsResult:
    """Solve a padded power-of-two system variationally.

    Simplex search restarts from uniform random angles (seeded) until the
    cost tolerance is met or ``restarts`` budgets of ``max_evals`` are
    exhausted; then the best angles win, earliest restart breaking ties.
    ``init_theta`` warm-starts the first restart, which is what lets a
    Newton run reuse the previous iteration's angles.
    """
    matrix = np.asarray(sys.matrix, dtype=float)
    rhs = np.asarray(sys.rhs, dtype=float)
    dim = matrix.shape[0]
    n = int(np.log2(dim))
    if 2**n != dim:
        raise ValueError("system must be padded to a power-of-two size")
    rhs_norm = np.linalg.norm(rhs)
    if rhs_norm == 0.0:
        raise ValueError("right-hand side must be nonzero")
    b_unit = rhs / rhs_norm
    ansatz = Ansatz(n_qubits=n, layers=layers)

    evals = 0
    best_cost = np.inf
    best_theta = None

    def objective(theta):
        nonlocal evals, best_cost, best_theta
        evals += 1
        value = _cost_raw(matrix, b_unit, ansatz, theta)
        if value < best_cost:
            best_cost = value
            best_theta = theta.copy()
            if value < cost_tol:
                raise _ToleranceReached
        return value

    restarts_used = 0
    for restart in range(max(restarts, 1)):
        restarts_used = restart + 1
        if restart == 0 and init_theta is not None:
            theta0 = np.asarray(init_theta, dtype=float)
            if theta0.shape != (ansatz.n_parameters,):
                raise ValueError("init_theta has the wrong length")
        else:
            rng = np.random.default_rng([seed, restart])
            theta0 = rng.uniform(0.0, 2.0 * np.pi, ansatz.n_parameters)
        try:
            scipy.optimize.minimize(
                objective, theta0, method="Nelder-Mead",
                options={"maxfev": max_evals, "fatol": 1e-15, "xatol": 1e-12})
        except _ToleranceReached:
            break
        if best_cost < cost_tol:
            break

    v = ansatz_amplitudes(ansatz, best_theta)
    alpha = recover_scale(matrix, v, rhs)
    return VqlsResult(solution=alpha * v, final_cost=float(best_cost), evals=evals,
                      restarts_used=restarts_used, reached_tol=bool(best_cost < cost_tol),
                      theta=best_theta)


class _VqlsSession:
    def __init__(self, opts: dict, seed: int):
        self.opts = opts
        self.seed = seed
        self.call_index = 0
        self.last_theta: np.ndarray | None = None
        self.last_diagnostics: dict = {}

    def solve(self, system: LinearSystem) -> BackendSolution:
        call_seed = int(np.random.SeedSequence([self.seed, self.call_index]).generate_state(1)[0])
        self.call_index += 1

        def padded_solve(matrix, rhs):
            result = vqls_solve(
                LinearSystem(matrix, rhs, system.condition_estimate),
                seed=call_seed, init_theta=self.last_theta, **self.opts)
            self.last_theta = result.theta
            self.last_diagnostics = result.diagnostics()
            return result.solution

        x = solve_truncated(system, padded_solve)
        return BackendSolution(x=x, diagnostics=dict(self.last_diagnostics))


class VqlsBackend:
    """Newton-loop linear-solver backend driven by the variational solver."""

    name = "vqls"

    def __init__(self, layers: int = DEFAULT_LAYERS, max_evals: int = DEFAULT_MAX_EVALS,
                 restarts: int = DEFAULT_RESTARTS, cost_tol: float = DEFAULT_COST_TOL):
        self.opts = {"layers": layers, "max_evals": max_evals,
                     "restarts": restarts, "cost_tol": cost_tol}

    def session(self, seed: int) -> _VqlsSession:
        return _VqlsSession(self.opts, seed)
