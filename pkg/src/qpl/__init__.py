"""Numerical laboratory for quasi-Poisson manifolds."""

from qpl.lie import GroupModel, build_model

__version__ = "0.1.0"
