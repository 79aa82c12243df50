"""Smooth numbers in short intervals: exact counts, saddle-point and contour estimates."""

__version__ = "0.1.0"
