"""Monte Carlo simulator for spatially non-stationary ELAA-MIMO channels."""

__version__ = "0.1.0"
