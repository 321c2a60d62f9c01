"""Strict avalanche analysis of the SHA-1 compression function."""

__version__ = "0.1.0"
