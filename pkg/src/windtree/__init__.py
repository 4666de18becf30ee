"""Wind-tree invariant sets via self-similar interval exchanges."""

__version__ = "0.1.0"
