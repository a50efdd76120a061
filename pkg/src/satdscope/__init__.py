"""satd-scope: link code comments to their syntactic context and measure
self-admitted technical debt density across a Java corpus."""

__version__ = "0.1.0"
