"""Simulation and exact theory for random intersection graph processes."""

__version__ = "0.1.0"
