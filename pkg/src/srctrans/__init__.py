"""Incremental multi-language source transformation toolkit."""

__version__ = "0.1.0"
