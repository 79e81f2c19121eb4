"""Design and simulation tools for ship-transported, error-corrected quantum memories."""

__version__ = "0.1.0"
