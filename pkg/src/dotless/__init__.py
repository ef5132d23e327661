"""Dotless Arabic text: undotting, corpus statistics, scaling laws and n-gram models."""

__version__ = "0.1.0"
