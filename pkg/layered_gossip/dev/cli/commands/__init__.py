"""Implementations behind the command line commands."""
