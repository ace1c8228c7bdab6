"""Finite entailment of unions of conjunctive regular path queries over ALC."""

__version__ = "0.1.0"
