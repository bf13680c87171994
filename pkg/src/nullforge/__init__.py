"""Source-level mutation testing for Java with null-type fault operators."""

__version__ = "0.1.0"
