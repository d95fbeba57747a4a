"""Water distribution network data model and incidence matrices.

A network is a connected graph of junctions (demand nodes), reservoirs
(fixed-head nodes) and pipes. All quantities are SI: heads and elevations
in m, demands and flowrates in m^3/s, lengths and diameters in m.
Roughness is the dimensionless Hazen-Williams C.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np


class NetworkError(ValueError):
    """Raised when a network violates a structural invariant."""


@dataclass(frozen=True)
class Junction:
    id: str
    elevation: float
    base_demand: float = 0.0


@dataclass(frozen=True)
class Reservoir:
    id: str
    head: float


@dataclass(frozen=True)
class Pipe:
    id: str
    start_node: str
    end_node: str
    length: float
    diameter: float
    roughness: float


@dataclass(frozen=True)
class Network:
    """Immutable network topology. Validated on construction."""

    junctions: tuple[Junction, ...]
    reservoirs: tuple[Reservoir, ...]
    pipes: tuple[Pipe, ...]
    name: str = "network"

    def __post_init__(self):
        object.__setattr__(self, "junctions", tuple(self.junctions))
        object.__setattr__(self, "reservoirs", tuple(self.reservoirs))
        object.__setattr__(self, "pipes", tuple(self.pipes))
        self._validate()

    def _validate(self) -> None:
        node_ids = [n.id for n in self.junctions] + [r.id for r in self.reservoirs]
        if len(set(node_ids)) != len(node_ids):
            dupes = sorted({i for i in node_ids if node_ids.count(i) > 1})
            raise NetworkError(f"duplicate node ids: {dupes}")
        pipe_ids = [p.id for p in self.pipes]
        if len(set(pipe_ids)) != len(pipe_ids):
            raise NetworkError("duplicate pipe ids")
        if not self.reservoirs:
            raise NetworkError("network has no reservoir")
        known = set(node_ids)
        for p in self.pipes:
            for end in (p.start_node, p.end_node):
                if end not in known:
                    raise NetworkError(f"pipe {p.id!r} references unknown node {end!r}")
            if p.start_node == p.end_node:
                raise NetworkError(f"pipe {p.id!r} is a self-loop")
            if p.length <= 0:
                raise NetworkError(f"pipe {p.id!r} has non-positive length")
            if p.diameter <= 0:
                raise NetworkError(f"pipe {p.id!r} has non-positive diameter")
            if p.roughness <= 0:
                raise NetworkError(f"pipe {p.id!r} has non-positive roughness")
        for j in self.junctions:
            if j.base_demand < 0:
                raise NetworkError(f"junction {j.id!r} has negative demand")
        self._check_connected()

    def _check_connected(self) -> None:
        adjacency: dict[str, list[str]] = {}
        for p in self.pipes:
            adjacency.setdefault(p.start_node, []).append(p.end_node)
            adjacency.setdefault(p.end_node, []).append(p.start_node)
        seen = set()
        queue = deque(r.id for r in self.reservoirs)
        seen.update(r.id for r in self.reservoirs)
        while queue:
            node = queue.popleft()
            for other in adjacency.get(node, ()):
                if other not in seen:
                    seen.add(other)
                    queue.append(other)
        unreached = [j.id for j in self.junctions if j.id not in seen]
        if unreached:
            raise NetworkError(f"junctions not reachable from any reservoir: {unreached}")

    @property
    def n_junctions(self) -> int:
        return len(self.junctions)

    @property
    def n_pipes(self) -> int:
        return len(self.pipes)

    @property
    def junction_ids(self) -> list[str]:
        return [j.id for j in self.junctions]

    @property
    def pipe_ids(self) -> list[str]:
        return [p.id for p in self.pipes]

    def junction_index(self, node_id: str) -> int:
        return self.junction_ids.index(node_id)

    def demands(self) -> np.ndarray:
        return np.array([j.base_demand for j in self.junctions])

    def elevations(self) -> np.ndarray:
        return np.array([j.elevation for j in self.junctions])

    def reservoir_heads(self) -> np.ndarray:
        return np.array([r.head for r in self.reservoirs])


@dataclass(frozen=True)
class IncidenceDecomposition:
    """Signed pipe/node incidence split into junction and reservoir blocks.

    Sign convention: positive flow runs start -> end of a pipe, so each pipe
    row holds -1 at its start node and +1 at its end node. ``a21`` is the
    transpose of ``a12`` by construction.
    """

    a12: np.ndarray  # pipes x junctions
    a10: np.ndarray  # pipes x reservoirs
    a21: np.ndarray = field(init=False)  # junctions x pipes

    def __post_init__(self):
        self.a12.setflags(write=False)
        self.a10.setflags(write=False)
        object.__setattr__(self, "a21", self.a12.T)


def incidence(net: Network) -> IncidenceDecomposition:
    """Build the signed incidence matrices of a network."""
    jidx = {j.id: k for k, j in enumerate(net.junctions)}
    ridx = {r.id: k for k, r in enumerate(net.reservoirs)}
    a12 = np.zeros((net.n_pipes, net.n_junctions))
    a10 = np.zeros((net.n_pipes, len(net.reservoirs)))
    for row, p in enumerate(net.pipes):
        for node, sign in ((p.start_node, -1.0), (p.end_node, +1.0)):
            if node in jidx:
                a12[row, jidx[node]] = sign
            else:
                a10[row, ridx[node]] = sign
    return IncidenceDecomposition(a12=a12, a10=a10)
