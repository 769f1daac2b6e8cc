"""Reusable pytest fixtures.

Every module in this package is registered as a pytest plugin, so its
fixtures are available in all test modules without imports.
"""
