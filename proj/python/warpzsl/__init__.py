"""Zero-shot audio classification with a WARP-trained bilinear compatibility model."""

from ._core import *  # noqa: F401,F403
from ._core import IoError, ValidationError  # noqa: F401

__version__ = "0.1.0"
