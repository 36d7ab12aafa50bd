"""Certified geometry and inequalities for a toral map family between the cat map and the Cerbelli-Giona map."""

__version__ = "0.1.0"
