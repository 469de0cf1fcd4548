"""Dissipative solution lab for the barotropic Euler system.

Thin python layer over the C++ core: grids and fields, the viscous solver,
defect estimation, record audits, oscillation diagnostics and selection.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
