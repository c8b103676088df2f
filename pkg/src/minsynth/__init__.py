"""Finite-trace temporal logic compilation and reachability-game synthesis."""

__version__ = "0.1.0"
