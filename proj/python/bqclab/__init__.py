"""Blended quasicontinuum models of a one-dimensional periodic atom chain.

The heavy lifting happens in the compiled extension `_bqclab`; this package
re-exports its public surface.
"""

from ._bqclab import *  # noqa: F401,F403
from ._bqclab import __version__  # noqa: F401
