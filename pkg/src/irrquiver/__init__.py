"""Quiver data of irregular meromorphic connections on the Riemann sphere."""

__version__ = "0.1.0"
