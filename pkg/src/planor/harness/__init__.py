"""Generators, exact baseline, verifier, serialization, reports and CLI."""
