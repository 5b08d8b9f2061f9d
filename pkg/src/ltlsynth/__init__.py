"""Bounded synthesis toolkit: LTL realizability and synthesis via SAT/QBF/DQBF."""

__version__ = "0.1.0"
