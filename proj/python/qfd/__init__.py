"""Moment hydrodynamics of graphene electrons.

Thin Python layer over the C++ core. Fields are exchanged as numpy arrays:
1D moments have shape (N, 4); 2D densities (ny, nx, 4) and currents
(ny, nx, 4, 2).
"""

from ._core import *  # noqa: F401,F403
from ._core import DomainError, ConfigError, PhysParams

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "1.0.0"
