"""Soliton-collision laboratory for one-dimensional NLS models.

The heavy lifting lives in the C++ extension ``_nlslab``; this package
re-exports its public names.
"""

from ._nlslab import *  # noqa: F401,F403
from ._nlslab import __doc__  # noqa: F401

__version__ = "0.1.0"
