"""Python bindings for the fncstance stance-detection library."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
