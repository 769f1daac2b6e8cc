"""Runtime code of layered_gossip."""
