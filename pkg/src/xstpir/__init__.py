"""X-secure T-private information retrieval from rational and Hermitian curves."""

__version__ = "0.1.0"
