"""Per-VM layered gossip protocol.

Modules:
    params: Tunable protocol parameters.
    messages: Message kinds and their payload rules.
    state: Per-VM state.
    selection: Fanout, latency-preferential target choice and leader agreement.
    node: Event handlers of the state machine.
"""
