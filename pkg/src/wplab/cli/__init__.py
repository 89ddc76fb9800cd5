"""Command implementations for the wplab CLI."""
