"""Fixed-length strong coordination toolkit."""

__version__ = "0.1.0"
