"""Test suite for the CLaRe toolkit."""
