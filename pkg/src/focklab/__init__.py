"""Weighted Fock space operators: criteria, quadrature and verdicts."""
__version__ = "0.1.0"
