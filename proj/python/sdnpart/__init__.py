"""SDN partitioning toolkit: domain partitioning, advertisement space
enumeration, and the capacity / traffic engineering / recovery models."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
