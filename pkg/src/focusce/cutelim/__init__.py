"""Syntactic cut elimination for cyclic Focus proofs."""

from .driver import eliminate_cuts, cut_order  # noqa: F401
