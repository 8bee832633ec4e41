"""Atom in a coherent superposition of two Jaynes-Cummings cavities."""

__version__ = "0.1.0"
