"""Mission routing, online path planning and benchmarking for underwater vehicles."""

__version__ = "0.1.0"
