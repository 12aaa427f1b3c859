"""Computational laboratory for incidence graphs over F_q^2, their curve
families and spectra, and polynomial-expansion experiments."""

__version__ = "0.1.0"
