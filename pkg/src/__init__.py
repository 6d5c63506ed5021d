"""Activated random walk simulation laboratory."""

__version__ = "0.1.0"
