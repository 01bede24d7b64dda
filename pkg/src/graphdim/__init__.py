"""Box-counting dimensions of graphs of continuous functions on [0, 1]."""

__version__ = "0.1.0"
