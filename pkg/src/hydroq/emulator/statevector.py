"""Exact statevector emulator for small quantum registers.

Amplitudes follow the convention that qubit 0 is the least significant
bit of the basis-state index. Evolution is exact complex arithmetic: no
sampling noise, no decoherence. Registers are capped at 20 qubits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_QUBITS = 20
UNITARITY_TOL = 1e-10
NORM_TOL = 1e-8

H_MATRIX = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
X_MATRIX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
Z_MATRIX = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _check_unitary(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("gate matrix must be square")
    dim = matrix.shape[0]
    if dim & (dim - 1) or dim == 0:
        raise ValueError("gate matrix dimension must be a power of two")
    if np.max(np.abs(matrix.conj().T @ matrix - np.eye(dim))) > UNITARITY_TOL:
        raise ValueError("gate matrix is not unitary")
    return matrix


@dataclass(frozen=True)
class Gate:
    """A single circuit operation: named gate or explicit (controlled) unitary."""

    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    matrix: np.ndarray | None = None
    angle: float | None = None

    def operator(self) -> np.ndarray:
        if self.kind == "H":
            return H_MATRIX
        if self.kind == "X":
            return X_MATRIX
        if self.kind == "RY":
            return ry_matrix(self.angle)
        if self.kind in ("CZ",):
            return Z_MATRIX  # applied under one control
        if self.kind in ("CNOT",):
            return X_MATRIX
        if self.kind in ("CU", "U"):
            return self.matrix
        raise ValueError(f"unknown gate kind {self.kind!r}")

    def describe(self) -> str:
        parts = [self.kind]
        if self.controls:
            parts.append("c=" + ",".join(map(str, self.controls)))
        parts.append("t=" + ",".join(map(str, self.targets)))
        if self.angle is not None:
            parts.append(f"{self.angle:.12g}")
        if self.kind in ("CU", "U"):
            parts.append(f"dim={self.matrix.shape[0]}")
        return " ".join(parts)


@dataclass
class QuantumState:
    """Unit-norm complex amplitude vector over ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"register size must be in [1, {MAX_QUBITS}]")
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2**self.n_qubits,):
            raise ValueError("amplitude vector length must be 2^n_qubits")
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm={norm!r})")

    @classmethod
    def zero(cls, n_qubits: int) -> "QuantumState":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> "QuantumState":
        """Normalize a nonzero vector into a state (length must be 2^n)."""
        vector = np.asarray(vector, dtype=complex)
        norm = np.linalg.norm(vector)
        if norm == 0.0:
            raise ValueError("cannot build a state from the zero vector")
        n = int(np.log2(len(vector)))
        if 2**n != len(vector):
            raise ValueError("vector length must be a power of two")
        return cls(n, vector / norm)

    def probability(self, basis_index: int) -> float:
        return float(np.abs(self.amplitudes[basis_index]) ** 2)


def _apply_operator(amps: np.ndarray, matrix: np.ndarray, targets: tuple[int, ...],
                    controls: tuple[int, ...], n: int) -> np.ndarray:
    """Apply a 2^m unitary to ``targets`` on the all-ones control subspace."""
    m = len(targets)
    if matrix.shape[0] != 2**m:
        raise ValueError("gate matrix size does not match target count")
    tensor = amps.copy().reshape((2,) * n)
    # axis of qubit q is n-1-q; gate index bit k belongs to targets[k]
    ctrl_axes = [n - 1 - c for c in controls]
    tgt_axes = [n - 1 - t for t in reversed(targets)]
    front = ctrl_axes + tgt_axes
    tensor = np.moveaxis(tensor, front, range(len(front)))
    shape = tensor.shape
    tensor = tensor.reshape(2 ** len(controls), 2**m, -1)
    if not tensor.flags.owndata:
        tensor = tensor.copy()
    tensor[-1] = matrix @ tensor[-1]
    tensor = tensor.reshape(shape)
    tensor = np.moveaxis(tensor, range(len(front)), front)
    return tensor.reshape(-1)


def apply(state: QuantumState, gate: Gate) -> QuantumState:
    """Apply one gate, returning a new state (inputs are never mutated)."""
    n = state.n_qubits
    touched = gate.targets + gate.controls
    if len(set(touched)) != len(touched):
        raise ValueError("gate targets and controls must be distinct")
    for q in touched:
        if not 0 <= q < n:
            raise ValueError(f"qubit index {q} out of range for {n}-qubit state")
    amps = _apply_operator(state.amplitudes, gate.operator(), gate.targets,
                           gate.controls, n)
    return QuantumState(n, amps)


@dataclass
class Circuit:
    """Ordered gate list over a fixed-width register."""

    n_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"register size must be in [1, {MAX_QUBITS}]")

    def _add(self, gate: Gate) -> "Circuit":
        touched = gate.targets + gate.controls
        if len(set(touched)) != len(touched):
            raise ValueError("gate targets and controls must be distinct")
        for q in touched:
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"qubit index {q} out of range for {self.n_qubits} qubits")
        self.gates.append(gate)
        return self

    def h(self, q: int) -> "Circuit":
        return self._add(Gate("H", (q,)))

    def x(self, q: int) -> "Circuit":
        return self._add(Gate("X", (q,)))

    def ry(self, q: int, theta: float) -> "Circuit":
        return self._add(Gate("RY", (q,), angle=float(theta)))

    def cz(self, control: int, target: int) -> "Circuit":
        return self._add(Gate("CZ", (target,), controls=(control,)))

    def cnot(self, control: int, target: int) -> "Circuit":
        return self._add(Gate("CNOT", (target,), controls=(control,)))

    def unitary(self, matrix: np.ndarray, targets: tuple[int, ...] | list[int]) -> "Circuit":
        return self._add(Gate("U", tuple(targets), matrix=_check_unitary(matrix)))

    def controlled_unitary(self, matrix: np.ndarray, controls, targets) -> "Circuit":
        return self._add(Gate("CU", tuple(targets), controls=tuple(controls),
                              matrix=_check_unitary(matrix)))

    def extend(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise ValueError("cannot concatenate circuits of different widths")
        for gate in other.gates:
            self._add(gate)
        return self

    def dump(self) -> str:
        """Plain-text gate list, one gate per line."""
        return "\n".join(g.describe() for g in self.gates) + ("\n" if self.gates else "")


def run(circuit: Circuit, initial: QuantumState | None = None) -> QuantumState:
    """Apply the circuit's gates in order."""
    state = QuantumState.zero(circuit.n_qubits) if initial is None else initial
    if state.n_qubits != circuit.n_qubits:
        raise ValueError("initial state width does not match circuit")
    for gate in circuit.gates:
        state = apply(state, gate)
    return state


def inner_product(a: QuantumState, b: QuantumState) -> complex:
    """<a|b>; first argument is conjugated."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("states have different register sizes")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def partial_project(state: QuantumState, qubit: int, outcome: int) -> tuple[QuantumState, float]:
    """Project one qubit onto ``outcome`` and renormalize.

    Returns the post-measurement state and the outcome probability. A
    zero-probability projection is an error.
    """
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    n = state.n_qubits
    if not 0 <= qubit < n:
        raise ValueError(f"qubit index {qubit} out of range")
    tensor = state.amplitudes.reshape((2,) * n)
    axis = n - 1 - qubit
    keep = np.take(tensor, outcome, axis=axis)
    probability = float(np.sum(np.abs(keep) ** 2))
    if probability <= 1e-300:
        raise ValueError(f"projection of qubit {qubit} onto {outcome} has zero probability")
    projected = np.zeros_like(tensor)
    index = [slice(None)] * n
    index[axis] = outcome
    projected[tuple(index)] = keep / np.sqrt(probability)
    return QuantumState(n, projected.reshape(-1)), probability
