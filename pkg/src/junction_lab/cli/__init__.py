"""Command-line interface for the junction lab."""

from .main import main

__all__ = ['main']
