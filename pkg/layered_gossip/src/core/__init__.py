"""Usage records, aggregate digests and their merge rules."""
