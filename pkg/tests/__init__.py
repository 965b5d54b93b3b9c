"""Tests for PyCalistaIsta."""
