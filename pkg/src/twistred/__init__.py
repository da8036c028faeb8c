"""Spin Sutherland systems from twisted-conjugation reduction."""

__version__ = "0.1.0"
