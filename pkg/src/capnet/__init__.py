"""Capacity prefactors for metastable landscapes via electrical networks."""

__version__ = "0.1.0"
