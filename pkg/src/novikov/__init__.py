"""Morse-Novikov (twisted) cohomology of finite simplicial complexes,
computed exactly over the rationals."""

__version__ = "0.1.0"
