"""Periodic cylinders of constant nonlocal mean curvature."""

from ._cnmc import *  # noqa: F401,F403
from ._cnmc import __doc__  # noqa: F401
