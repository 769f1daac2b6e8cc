"""Command line of layered_gossip."""
