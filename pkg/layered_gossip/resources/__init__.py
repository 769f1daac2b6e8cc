"""Static resource files of layered_gossip.

Resources are located at runtime with
``layered_gossip.src.resource.get_resource_path()``.
"""
