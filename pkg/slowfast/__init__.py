"""Tikhonov-Fenichel reduction of singularly perturbed systems, with convergence checks."""

__version__ = "0.1.0"
