"""Scenarios, topology, latency model and the discrete-event engine."""
