"""Autonoma: hierarchical multi-agent workflow automation runtime.

Pipeline: coordinator intent gating -> planner DAG generation -> supervisor
dispatch with retries and health checks -> pluggable worker agents ->
reporter aggregation. Exposed as a LAN-confined gateway with event streaming,
fully testable offline via a deterministic scripted completion provider and
a fault-injection harness.
"""

__version__ = "0.1.0"
