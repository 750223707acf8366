"""Flattening and catalecticant rank bounds with exact arithmetic."""

__version__ = "0.1.0"
