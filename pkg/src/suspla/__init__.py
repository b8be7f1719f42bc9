"""Exact computations with suspensive Lie algebras, rigid bialgebras and Dyer-Lashof operations."""
from __future__ import annotations

__version__ = "0.1.0"

__all__ = ["__version__"]
