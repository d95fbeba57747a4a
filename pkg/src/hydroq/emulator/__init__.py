from .statevector import (
    MAX_QUBITS,
    Circuit,
    Gate,
    QuantumState,
    apply,
    inner_product,
    partial_project,
    run,
    ry_matrix,
)

__all__ = [
    "MAX_QUBITS",
    "Circuit",
    "Gate",
    "QuantumState",
    "apply",
    "inner_product",
    "partial_project",
    "run",
    "ry_matrix",
]
