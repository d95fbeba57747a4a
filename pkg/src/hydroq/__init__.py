"""Water network hydraulics with emulated quantum linear solvers."""

__version__ = "0.1.0"
