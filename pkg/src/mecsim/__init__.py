"""Slotted-time simulator and online controller for multi-user
mobile-edge computing power/delay tradeoffs."""

from mecsim.model import (
    ConfigError,
    DeviceConfig,
    DeviceState,
    ParsedConfig,
    SlotDecision,
    SlotRecord,
    SystemConfig,
    config_hash,
    emit_config,
    local_departure,
    local_power,
    parse_config,
    pathloss,
    remote_departure,
)
from mecsim.stochastic import ArrivalProcess, FadingProcess, device_rng, make_streams
from mecsim.controller import (
    ControlContext,
    bandwidth_allocation,
    bandwidth_claim,
    cpu_frequency,
    decide_slot,
    marginal_rate,
    offloading_objective,
    slot_objective,
    solve_offloading,
    transmit_power,
)
from mecsim.simulator import (
    Policy,
    RunResult,
    SimulationError,
    Simulator,
    TraceArrays,
    queue_update,
    summarize,
)
from mecsim.baselines import (
    POLICIES,
    LocalOnlyPolicy,
    LyapunovPolicy,
    StaticEqualPolicy,
    make_policy,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DeviceConfig",
    "DeviceState",
    "ParsedConfig",
    "SlotDecision",
    "SlotRecord",
    "SystemConfig",
    "config_hash",
    "emit_config",
    "parse_config",
    "pathloss",
    "local_departure",
    "local_power",
    "remote_departure",
    "ArrivalProcess",
    "FadingProcess",
    "device_rng",
    "make_streams",
    "ControlContext",
    "cpu_frequency",
    "transmit_power",
    "marginal_rate",
    "bandwidth_claim",
    "bandwidth_allocation",
    "offloading_objective",
    "slot_objective",
    "solve_offloading",
    "decide_slot",
    "Policy",
    "RunResult",
    "SimulationError",
    "Simulator",
    "TraceArrays",
    "queue_update",
    "summarize",
    "LyapunovPolicy",
    "LocalOnlyPolicy",
    "StaticEqualPolicy",
    "POLICIES",
    "make_policy",
    "__version__",
]
