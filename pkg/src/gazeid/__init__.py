"""gazeid: eye-movement biometric verification toolkit."""

__version__ = "0.1.0"
