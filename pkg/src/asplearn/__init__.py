"""Learning answer set programs from noisy, penalty-weighted examples."""

__version__ = "0.1.0"
