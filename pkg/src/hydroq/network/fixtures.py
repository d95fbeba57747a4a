"""Built-in benchmark networks, shipped as INP files under ``data/``."""

from __future__ import annotations

from importlib import resources

from .inp import parse_inp
from .model import Network

FIXTURE_NAMES = ("zero_loop", "two_loop")


def fixture_text(name: str) -> str:
    """Raw INP text of a built-in fixture."""
    if name not in FIXTURE_NAMES:
        raise ValueError(f"unknown fixture {name!r}; expected one of {FIXTURE_NAMES}")
    return resources.files("hydroq.network").joinpath(f"data/{name}.inp").read_text()


def builtin_fixture(name: str) -> Network:
    """Load a built-in fixture network by name (``zero_loop`` or ``two_loop``)."""
    return parse_inp(fixture_text(name), name=name)
