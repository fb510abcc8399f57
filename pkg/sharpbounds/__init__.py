"""
Sharp bounds for counterfactual probabilities and their contrasts under
unmeasured confounding.
"""

import logging

# Global flag set True by `sharpbounds_cli.__main__`
is_cli = False

# Global sharpbounds logger
logger = logging.getLogger("sharpbounds")

# Setup package level version
from .version import __version__  # noqa
