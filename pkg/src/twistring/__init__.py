"""Twisted group algebra engine."""

__version__ = "0.1.0"
