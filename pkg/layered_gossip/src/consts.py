"""Default values shared by the protocol, simulator and scenario loader."""

T_GOSSIP: int = 1000
"""Intra-group gossip period in ticks (one tick is one millisecond)."""

BETA: float = 0.1
"""Fanout coefficient applied to the number of peers."""

F_MAX: int = 5
"""Upper bound on the intra-group fanout."""

K_GROUP: int = 5
"""Intra-group rounds per inter-group round."""

K_CLOUD: int = 5
"""Inter-group rounds per inter-cloud round."""

STALENESS_ROUNDS: int = 10
"""Record expiry expressed in gossip periods; the window is this times ``t_gossip``."""

EPSILON_LATENCY: float = 0.1
"""Latency offset in milliseconds keeping selection weights finite."""

SEEN_CAPACITY: int = 1024
"""Number of message ids a node remembers for duplicate suppression."""

TAU: float = 0.8
"""Cosine similarity a VM needs to join an existing group."""

MESSAGES_PER_POLL: int = 2
"""Messages per VM per centralized poll (request plus response)."""

LOSS_INTRA: float = 0.01
"""Drop probability for traffic that stays inside one cloud region."""

INTRA_GROUP_MS: tuple[float, float] = (0.5, 2.0)
"""Latency range between members of one group."""

INTRA_REGION_MS: tuple[float, float] = (1.0, 5.0)
"""Latency range between groups of one region."""

INTER_REGION_MS: tuple[float, float] = (50.0, 150.0)
"""Latency range between regions."""

PERCENT_STEP: float = 5.0
"""Largest per-round change of a percentage metric in the workload walk."""

NET_MAX_KBPS: float = 1000.0
"""Upper clamp of the network metric in the workload walk."""

NET_STEP_KBPS: float = 50.0
"""Largest per-round change of the network metric in the workload walk."""

COLLECTOR_ID: str = "collector"
"""Node name of the central server in the centralized baseline."""
