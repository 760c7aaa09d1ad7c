"""Partial-sum paths of exponential sums over prime fields and their random Fourier limit."""

__version__ = "0.1.0"
