from .model import (
    IncidenceDecomposition,
    Junction,
    Network,
    NetworkError,
    Pipe,
    Reservoir,
    incidence,
)
from .inp import InpParseError, parse_inp, serialize_inp
from .fixtures import FIXTURE_NAMES, builtin_fixture, fixture_text

__all__ = [
    "IncidenceDecomposition",
    "Junction",
    "Network",
    "NetworkError",
    "Pipe",
    "Reservoir",
    "incidence",
    "InpParseError",
    "parse_inp",
    "serialize_inp",
    "FIXTURE_NAMES",
    "builtin_fixture",
    "fixture_text",
]
