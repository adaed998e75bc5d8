"""Numerical evaluation of a quadruple principal-value integral over two moons."""
__version__ = "0.1.0"

from .quadrature import QuadConfig, QuadResult  # noqa: E402,F401
