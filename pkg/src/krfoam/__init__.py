"""krfoam: sl(N) link homology over exact fields, from planar diagrams."""

__version__ = "0.1.0"
