"""kIkI safety verification for a small C-like bit-vector language."""

__version__ = "0.1.0"
