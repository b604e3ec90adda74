"""Gravitational Kerr self-interaction of cavity light: Fock-space simulation and metrology."""
__version__ = "0.1.0"
