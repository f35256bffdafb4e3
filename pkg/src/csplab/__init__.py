"""Consistency-hierarchy laboratory with exact arithmetic."""

__version__ = "0.1.0"
