"""Run metrics and their CSV, JSON and JSON-lines writers."""
