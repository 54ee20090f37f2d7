"""Assertion generation and evaluation pipeline for Java methods."""

__version__ = "0.1.0"
