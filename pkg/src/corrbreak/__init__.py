"""Change point tests for lag-k autocorrelations of non-stationary series."""
__version__ = "0.1.0"
