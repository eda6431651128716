"""Camera-extrinsic perturbation toolkit."""

from ._camext import *  # noqa: F401,F403
from ._camext import __version__  # noqa: F401
