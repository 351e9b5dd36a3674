"""Per-slot policies: the full controller plus two restricted references.

Each policy maps start-of-slot (queues, gains) to a SlotDecision.  The
restricted ones optimize over a subset of the full feasible region, so on
any slot their cost is at least the full policy's; the gap is what the
comparison sweeps measure.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from mecsim.controller import (
    ControlContext,
    cpu_frequency,
    decide_slot,
    transmit_power,
)
from mecsim.model import DeviceConfig, SlotDecision, SystemConfig

__all__ = [
    "LyapunovPolicy",
    "LocalOnlyPolicy",
    "StaticEqualPolicy",
    "POLICIES",
    "make_policy",
]


class LyapunovPolicy:
    """Full queue-weighted drift-plus-penalty controller."""

    name = "lyapunov"

    def __init__(self, system: SystemConfig, devices: Sequence[DeviceConfig]):
        self._ctx = ControlContext.from_config(system, devices)

    def decide(self, queues: np.ndarray, gains: np.ndarray) -> SlotDecision:
        return decide_slot(self._ctx, queues, gains)


class LocalOnlyPolicy:
    """No offloading: radios stay off, CPUs run the usual frequency rule.

    Under overload the frequency rule pins the CPUs at f_max for any
    reasonable control weight, and backlog grows at the arrival/service
    deficit rate.
    """

    name = "local_only"

    def __init__(self, system: SystemConfig, devices: Sequence[DeviceConfig]):
        self._ctx = ControlContext.from_config(system, devices)
        n = system.num_devices
        self._alpha = np.full(n, 1.0 / n)
        self._zero = np.zeros(n)

    def decide(self, queues: np.ndarray, gains: np.ndarray) -> SlotDecision:
        ctx = self._ctx
        f = cpu_frequency(queues, ctx.v, ctx.tau, ctx.kappa,
                          ctx.cycles_per_bit, ctx.f_max)
        return SlotDecision(freqs=f, tx_powers=self._zero.copy(),
                            bw_fracs=self._alpha.copy())


class StaticEqualPolicy:
    """Even static bandwidth split; frequency and power closed forms on top."""

    name = "static_equal"

    def __init__(self, system: SystemConfig, devices: Sequence[DeviceConfig]):
        self._ctx = ControlContext.from_config(system, devices)
        n = system.num_devices
        self._alpha = np.full(n, 1.0 / n)

    def decide(self, queues: np.ndarray, gains: np.ndarray) -> SlotDecision:
        ctx = self._ctx
        f = cpu_frequency(queues, ctx.v, ctx.tau, ctx.kappa,
                          ctx.cycles_per_bit, ctx.f_max)
        p = transmit_power(queues, self._alpha, gains, ctx.v, ctx.tau, ctx.w,
                           ctx.n0, ctx.p_max)
        return SlotDecision(freqs=f, tx_powers=p, bw_fracs=self._alpha.copy())


POLICIES = {
    "lyapunov": LyapunovPolicy,
    "local_only": LocalOnlyPolicy,
    "static_equal": StaticEqualPolicy,
}


def make_policy(name: str, system: SystemConfig,
                devices: Sequence[DeviceConfig]):
    """Instantiate a policy by its registry name."""
    try:
        cls = POLICIES[name]
    except KeyError:
        valid = ", ".join(sorted(POLICIES))
        raise ValueError(f"unknown policy '{name}'; valid names: {valid}") \
            from None
    return cls(system, devices)
