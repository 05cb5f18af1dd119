"""Cyclic Focus-system proofs for the alternation-free modal mu-calculus:
representation, checking, proof search and syntactic cut elimination."""

__version__ = "0.1.0"
