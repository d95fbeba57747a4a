"""Phase-estimation linear solver on the emulator.

The scaled system matrix drives controlled time-evolution blocks (exact
matrix exponentials; Trotter error would only blur the effect under
study), a clock register captures eigenphases, a controlled rotation
inverts them onto an ancilla, and post-selecting the ancilla leaves the
solution in the system register. Accuracy lives and dies by whether the
clock register resolves the spectrum: configurations chosen for the
well-conditioned early Newton systems go blind when conditioning grows,
which is exactly the failure mode the Newton stability sweeps expose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..emulator.statevector import MAX_QUBITS, Circuit, QuantumState, partial_project, run
from ..hydraulics.backends import BackendSolution
from ..hydraulics.gga import LinearSystem
from .vqls import recover_scale

DEFAULT_MAX_CLOCK = 8


@dataclass(frozen=True)
class HhlConfig:
    """Clock width, evolution scale and rotation constant of one HHL circuit."""

    n_clock: int
    evolution_scale: float  # t; maps eigenvalues into the phase window
    rotation_constant: float  # C; at most the smallest resolvable phase

    def __post_init__(self):
        if self.n_clock < 1:
            raise ValueError("n_clock must be at least 1")
        if not 0.0 < self.rotation_constant <= 1.0:
            raise ValueError("rotation constant must be in (0, 1]")
        if self.evolution_scale <= 0.0:
            raise ValueError("evolution scale must be positive")


def gershgorin_max(matrix: np.ndarray) -> float:
    """Upper bound on the largest eigenvalue magnitude of a symmetric matrix."""
    diag = np.diag(matrix)
    radius = np.sum(np.abs(matrix), axis=1) - np.abs(diag)
    return float(np.max(diag + radius))


def choose_config(sys: LinearSystem, max_clock: int = DEFAULT_MAX_CLOCK) -> HhlConfig:
    """Static configuration policy driven by the system's condition estimate.

    ``n_clock = min(max_clock, ceil(log2(kappa)) + 2)``; the evolution
    scale maps the Gershgorin bound just below the top of the phase
    window; the rotation constant is the smallest resolvable phase.
    """
    kappa = max(float(sys.condition_estimate), 1.0)
    if math.isinf(kappa):
        n_clock = max_clock
    else:
        n_clock = min(max_clock, max(math.ceil(math.log2(kappa)) + 2, 1))
    bound = max(gershgorin_max(sys.matrix), 1e-300)
    t = 2.0 * math.pi * (1.0 - 2.0**-n_clock) / bound
    return HhlConfig(n_clock=n_clock, evolution_scale=t, rotation_constant=2.0**-n_clock)


def preparation_unitary(target: np.ndarray) -> np.ndarray:
    """A unitary whose first column is the given unit vector."""
    dim = len(target)
    basis = np.eye(dim, dtype=complex)
    k = int(np.argmax(np.abs(target)))
    columns = np.column_stack([target] + [basis[:, j] for j in range(dim) if j != k])
    q, _ = np.linalg.qr(columns)
    if np.vdot(q[:, 0], target).real < 0:
        q[:, 0] = -q[:, 0]
    phase = np.vdot(q[:, 0], target)
    q[:, 0] = q[:, 0] * phase / abs(phase) if abs(phase) > 0 else q[:, 0]
    return q


def _phase_matrix(angle: float) -> np.ndarray:
    return np.array([[1.0, 0.0], [0.0, np.exp(1j * angle)]], dtype=complex)


SWAP_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def add_qft(circ: Circuit, qubits: list[int], inverse: bool = False) -> Circuit:
    """Append the Fourier transform on ``qubits`` (qubits[0] = LSB)."""
    m = len(qubits)

    def forward():
        for j in range(m - 1, -1, -1):
            circ.h(qubits[j])
            for k in range(j - 1, -1, -1):
                angle = math.pi / 2 ** (j - k)
                circ.controlled_unitary(_phase_matrix(angle), [qubits[k]], [qubits[j]])
        for i in range(m // 2):
            circ.unitary(SWAP_MATRIX, (qubits[i], qubits[m - 1 - i]))

    def backward():
        for i in range(m // 2):
            circ.unitary(SWAP_MATRIX, (qubits[i], qubits[m - 1 - i]))
        for j in range(m):
            for k in range(j):
                angle = -math.pi / 2 ** (j - k)
                circ.controlled_unitary(_phase_matrix(angle), [qubits[k]], [qubits[j]])
            circ.h(qubits[j])

    backward() if inverse else forward()
    return circ


def evolution_powers(matrix: np.ndarray, t: float, n_clock: int) -> list[np.ndarray]:
    """exp(i*matrix*t*2^k) for k = 0..n_clock-1, via exact eigendecomposition."""
    eigvals, eigvecs = np.linalg.eigh(matrix)
    powers = []
    for k in range(n_clock):
        phases = np.exp(1j * eigvals * t * 2**k)
        powers.append((eigvecs * phases) @ eigvecs.conj().T)
    return powers


def inversion_rotation_matrix(n_clock: int, c: float) -> np.ndarray:
    """Block unitary rotating the ancilla by 2*arcsin(C/phase) per clock value.

    Clock value 0 maps to the identity: components whose eigenphase rounds
    to zero are never inverted, which is the under-resolved failure path.
    """
    dim = 2 ** (n_clock + 1)
    out = np.zeros((dim, dim), dtype=complex)
    n_states = 2**n_clock
    for y in range(n_states):
        if y == 0:
            block = np.eye(2)
        else:
            amp = min(c * n_states / y, 1.0)
            theta = 2.0 * math.asin(amp)
            cth, sth = math.cos(theta / 2.0), math.sin(theta / 2.0)
            block = np.array([[cth, -sth], [sth, cth]])
        for a_out in range(2):
            for a_in in range(2):
                out[y + n_states * a_out, y + n_states * a_in] = block[a_out, a_in]
    return out


def build_hhl_circuit(matrix: np.ndarray, b_unit: np.ndarray, cfg: HhlConfig) -> Circuit:
    """Assemble the full circuit: prepare |b>, QPE, invert, uncompute."""
    n_sys = int(np.log2(len(b_unit)))
    n_clock = cfg.n_clock
    total = n_sys + n_clock + 1
    if total > MAX_QUBITS:
        raise ValueError(f"register of {total} qubits exceeds the {MAX_QUBITS}-qubit cap")
    circ = Circuit(total)
    system = list(range(n_sys))
    clock = list(range(n_sys, n_sys + n_clock))
    ancilla = n_sys + n_clock

    circ.unitary(preparation_unitary(b_unit), tuple(system))
    for q in clock:
        circ.h(q)
    powers = evolution_powers(matrix, cfg.evolution_scale, n_clock)
    for k, u_k in enumerate(powers):
        circ.controlled_unitary(u_k, [clock[k]], tuple(system))
    add_qft(circ, clock, inverse=True)

    circ.unitary(inversion_rotation_matrix(n_clock, cfg.rotation_constant),
                 tuple(clock) + (ancilla,))

    add_qft(circ, clock, inverse=False)
    for k in range(n_clock - 1, -1, -1):
        circ.controlled_unitary(powers[k].conj().T, [clock[k]], tuple(system))
    for q in clock:
        circ.h(q)
    return circ


@dataclass
class HhlResult:
    solution: np.ndarray
    success_probability: float
    diagnostics: dict = field(default_factory=dict)


def hhl_solve(sys: LinearSystem, cfg: HhlConfig) -> HhlResult:
    """Solve a symmetric power-of-two system through the HHL circuit.

    The ancilla is post-selected by exact projection (probability reported,
    never sampled); the system-register block with the clock back at zero
    is rescaled classically into the solution. An eigenvalue bound outside
    the phase window is reported in the diagnostics, not wrapped silently.
    """
    matrix = np.asarray(sys.matrix, dtype=float)
    rhs = np.asarray(sys.rhs, dtype=float)
    dim = matrix.shape[0]
    n_sys = int(np.log2(dim))
    if 2**n_sys != dim:
        raise ValueError("system must be padded to a power-of-two size")
    if np.max(np.abs(matrix - matrix.T)) > 1e-10 * max(np.max(np.abs(matrix)), 1.0):
        raise ValueError("matrix must be symmetric")
    rhs_norm = np.linalg.norm(rhs)
    if rhs_norm == 0.0:
        raise ValueError("right-hand side must be nonzero")
    b_unit = rhs / rhs_norm

    window_exceeded = bool(
        gershgorin_max(matrix) * cfg.evolution_scale > 2.0 * math.pi)

    circ = build_hhl_circuit(matrix, b_unit, cfg)
    final = run(circ, QuantumState.zero(circ.n_qubits))
    projected, probability = partial_project(final, circ.n_qubits - 1, 1)

    # system-register block with clock = 0 (ancilla bit already fixed at 1)
    offset = 2 ** (n_sys + cfg.n_clock)
    block = projected.amplitudes[offset : offset + dim]
    block_norm = np.linalg.norm(block)
    if block_norm <= 1e-300:
        raise ValueError("post-selected state has no clock-zero component")
    leak = 1.0 - float(block_norm**2)
    pivot = block[int(np.argmax(np.abs(block)))]
    v = (block * (abs(pivot) / pivot)).real
    v = v / np.linalg.norm(v)
    alpha = recover_scale(matrix, v, rhs)
    return HhlResult(
        solution=alpha * v,
        success_probability=float(probability),
        diagnostics={
            "n_clock": cfg.n_clock,
            "evolution_scale": cfg.evolution_scale,
            "rotation_constant": cfg.rotation_constant,
            "success_probability": float(probability),
            "clock_leakage": leak,
            "phase_window_exceeded": window_exceeded,
        },
    )


class _HhlSession:
    def __init__(self, max_clock: int, reconfigure_per_iteration: bool):
        self.max_clock = max_clock
        self.reconfigure = reconfigure_per_iteration
        self.cfg: HhlConfig | None = None
        self.last_diagnostics: dict = {}

    def solve(self, system: LinearSystem) -> BackendSolution:
        if self.cfg is None or self.reconfigure:
            self.cfg = choose_config(system, self.max_clock)
        matrix, rhs = system.padded()
        result = hhl_solve(
            LinearSystem(matrix, rhs, system.condition_estimate), self.cfg)
        self.last_diagnostics = result.diagnostics
        return BackendSolution(x=result.solution[: system.size],
                               diagnostics=dict(result.diagnostics))


class HhlBackend:
    """Newton-loop backend wrapping the phase-estimation solver.

    The configuration is frozen on the first Newton system of a run;
    per-iteration reconfiguration exists behind a flag but is off by
    default, so growing condition numbers hit the frozen clock register.
    """

    name = "hhl"

    def __init__(self, max_clock: int = DEFAULT_MAX_CLOCK,
                 reconfigure_per_iteration: bool = False):
        self.max_clock = max_clock
        self.reconfigure_per_iteration = reconfigure_per_iteration

    def session(self, seed: int) -> _HhlSession:
        return _HhlSession(self.max_clock, self.reconfigure_per_iteration)
