"""Rumor spreader detection on user reply graphs."""

__version__ = "0.1.0"
