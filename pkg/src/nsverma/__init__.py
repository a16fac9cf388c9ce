"""Exact computations in Verma modules of the Neveu-Schwarz algebra."""

__version__ = "0.1.0"
