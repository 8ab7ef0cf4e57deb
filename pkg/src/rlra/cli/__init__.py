"""CLI package for the randomized low-rank toolkit."""

from .main import main

__all__ = ["main"]
