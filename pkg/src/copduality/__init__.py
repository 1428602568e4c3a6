"""Uniform LP duality analysis for linear copositive systems."""
from .model import CopSystem, load_problem

__version__ = "0.1.0"

__all__ = ["CopSystem", "load_problem", "__version__"]
