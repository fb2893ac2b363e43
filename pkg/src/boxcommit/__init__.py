"""Bit commitment from non-signaling boxes: classification, protocols and attacks."""

__version__ = "0.1.0"
