"""Integration tests - testing multiple components together."""
