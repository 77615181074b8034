"""Vaccine-stance social network analytics."""

__version__ = "0.1.0"
