"""Verification workbench for triple-product-property constructions in matrix Lie groups."""

__version__ = "0.1.0"
