"""Repository-mining toolkit: contributor metrics, clustering, and personas."""

__version__ = "0.1.0"
