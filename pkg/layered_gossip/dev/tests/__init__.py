"""Pytest infrastructure shared by the test suite.

Subpackages:
    fixtures: Fixtures registered as pytest plugins by ``conftest.py``.
"""
