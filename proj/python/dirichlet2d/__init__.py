"""Weighted convolution algebras of two-variable Dirichlet series."""

from dirichlet2d._core import *  # noqa: F401,F403
from dirichlet2d._core import __version__  # noqa: F401
