"""Odd Khovanov homology over the integers, with cobordism maps."""

__version__ = "0.1.0"
