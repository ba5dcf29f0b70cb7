"""Compile QFT and QAOA circuits onto linear and two-chip heavy-hex-derived devices."""

__version__ = "0.1.0"
