"""Horizon-specific forecastability diagnostics from auto-mutual information."""

from ._core import *  # noqa: F401,F403
from ._core import ForecastabilityError

__version__ = "0.1.0"
__all__ = [name for name in dir() if not name.startswith("_")]
