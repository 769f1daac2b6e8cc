"""Pytest configuration for tests.

Registers the layered_gossip pytest plugin, which provides the shared
fixtures.
"""

pytest_plugins = ["layered_gossip.dev.tests.conftest"]
