"""Quantile forecasting, interval metrics, indicator signals and backtests."""

from ._futurequant import *  # noqa: F401,F403
from ._futurequant import __version__, FqError  # noqa: F401
