"""Interval decision of nonlinear real constraint conjunctions, with
machine-checkable unsatisfiability proofs."""

__version__ = "0.1.0"
