"""CLAN: community detection that keeps lowly-connected nodes."""

__version__ = "0.1.0"
