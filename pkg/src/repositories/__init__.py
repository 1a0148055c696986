"""Repositories module initialization."""
