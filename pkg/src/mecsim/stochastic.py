"""Seeded random processes driving the simulation.

Each (device, process) pair owns an independent substream derived from the
root seed via SeedSequence spawn keys, so a device's sample path depends only
on (seed, device index, process kind).  Changing the control weight, the
policy, or the number of other devices never perturbs the draws, which is
what makes tradeoff curves comparable across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from mecsim.model import DeviceConfig, SystemConfig, pathloss

__all__ = [
    "ARRIVAL_TAG",
    "FADING_TAG",
    "device_rng",
    "make_streams",
    "ArrivalProcess",
    "FadingProcess",
]

ARRIVAL_TAG = 0
FADING_TAG = 1

# sampler(rng, size) -> unit-mean positive gains
GainSampler = Callable[[np.random.Generator, int], np.ndarray]


def device_rng(seed: int, device: int, process_tag: int) -> np.random.Generator:
    """Independent generator for one (device, process) substream."""
    ss = np.random.SeedSequence(seed, spawn_key=(device, process_tag))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class ArrivalProcess:
    """Per-slot workload arrivals, uniform on [0, A_max] per device."""

    seed: int
    arrival_max: tuple[float, ...]  # bits, one per device

    def sample(self, horizon: int) -> np.ndarray:
        """(horizon, N) arrival matrix in bits."""
        cols = [
            device_rng(self.seed, i, ARRIVAL_TAG).uniform(0.0, a_max, horizon)
            for i, a_max in enumerate(self.arrival_max)
        ]
        return np.column_stack(cols)

    def mean_rates(self) -> np.ndarray:
        """Analytic mean arrival rate per device, bits/slot."""
        return np.asarray(self.arrival_max) / 2.0


@dataclass(frozen=True)
class FadingProcess:
    """Channel power gains: pathloss times unit-mean small-scale fading.

    The small-scale law is injectable; the default is the standard
    exponential (Rayleigh power fading).  Samplers must return unit-mean
    draws, which are then scaled by each device's fading_mean and pathloss.
    """

    seed: int
    pathlosses: tuple[float, ...]    # large-scale attenuation per device
    fading_means: tuple[float, ...]  # mean small-scale power gain per device
    sampler: Optional[GainSampler] = None

    def sample(self, horizon: int) -> np.ndarray:
        """(horizon, N) channel power gain matrix, linear scale."""
        draw = self.sampler or (lambda rng, size: rng.exponential(1.0, size))
        cols = [
            g * m * draw(device_rng(self.seed, i, FADING_TAG), horizon)
            for i, (g, m) in enumerate(zip(self.pathlosses, self.fading_means))
        ]
        return np.column_stack(cols)


def make_streams(
    system: SystemConfig,
    devices: Sequence[DeviceConfig],
    sampler: Optional[GainSampler] = None,
) -> tuple[ArrivalProcess, FadingProcess]:
    """Build the arrival and fading processes for a configured system."""
    arrivals = ArrivalProcess(
        seed=system.rng_seed,
        arrival_max=tuple(d.arrival_max for d in devices),
    )
    fading = FadingProcess(
        seed=system.rng_seed,
        pathlosses=tuple(pathloss(system, d.distance) for d in devices),
        fading_means=tuple(d.fading_mean for d in devices),
        sampler=sampler,
    )
    return arrivals, fading
