"""Finite abstractions of dynamical systems: set-based trajectory distortion,
trajectory entropies, and rate-distortion lower bounds on the accuracy-size
tradeoff of grid abstractions."""

from rdabs._core import *  # noqa: F401,F403
from rdabs._core import __version__  # noqa: F401
