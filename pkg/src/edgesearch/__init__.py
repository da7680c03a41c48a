"""Edge-tier search intelligence over a pattern-matching cloud backend."""

__version__ = "0.1.0"
