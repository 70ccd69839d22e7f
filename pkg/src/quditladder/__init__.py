"""Simulation and synthesis tools for chains of driven transmon qudits."""
__version__ = "0.1.0"
