"""Unit tests - isolated component testing."""
