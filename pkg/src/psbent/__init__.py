"""Bent functions from partial spreads of groups and from prequasifields."""

__version__ = "0.1.0"
