"""Schemas module initialization."""
