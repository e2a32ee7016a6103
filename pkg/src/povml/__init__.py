"""Synthetic social-assistance microdata and the two modeling pipelines built on it:
flagging application underreporting and imputing six deprivation indicators."""

__version__ = "0.1.0"
