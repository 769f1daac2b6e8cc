"""Development tooling: command line and shared test fixtures."""
