"""Module containing the version information for the project."""

__version__ = "0.3.1"
