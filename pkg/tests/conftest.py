"""Shared fixtures: the canonical scenario document and a one-time JIT warmup."""

import copy

import numpy as np
import pytest

from mecsim.controller import (
    ControlContext,
    bandwidth_allocation,
    bandwidth_claim,
    decide_slot,
    solve_offloading,
)

# frozen with 60-digit decimal arithmetic, independent of the package code
N0_REF = 3.981071705534972e-21       # -174 dBm/Hz in W/Hz
G150_REF = 1.9753086419753086e-13    # -40 dB reference loss at 150 m, theta 4

_BASE_RAW = {
    "system": {
        "num_devices": 5,
        "tau_ms": 1.0,
        "w_MHz": 10.0,
        "N0_dBm_per_Hz": -174.0,
        "g0_dB": -40.0,
        "d0_m": 1.0,
        "theta": 4.0,
        "kappa": 1e-27,
        "V_bits2_per_W": 1e9,
        "eps_A": 1e-4,
        "horizon_slots": 5000,
        "seed": 1,
    },
    "devices": {
        "distance_m": 150.0,
        "cycles_per_bit": 737.5,
        "f_max_GHz": 1.0,
        "p_max_mW": 500.0,
        "A_max_kbits": 4.0,
        "fading_mean": 1.0,
    },
}


def make_raw(**system_overrides) -> dict:
    """Fresh copy of the default scenario document with system overrides."""
    raw = copy.deepcopy(_BASE_RAW)
    raw["system"].update(system_overrides)
    return raw


@pytest.fixture
def base_raw() -> dict:
    return make_raw()


@pytest.fixture
def small_ctx() -> ControlContext:
    """Two-device control context with the default physical constants."""
    return ControlContext(
        v=1e9, tau=1e-3, w=1e7, n0=N0_REF, kappa=1e-27, eps_bw=1e-4,
        f_max=np.array([1e9, 1e9]), p_max=np.array([0.5, 0.5]),
        cycles_per_bit=np.array([737.5, 737.5]))


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # load the compiled kernels once so per-test timings and hypothesis
    # deadlines are not polluted by the first-call compilation cache hit
    ctx = ControlContext(
        v=1e9, tau=1e-3, w=1e7, n0=N0_REF, kappa=1e-27, eps_bw=1e-4,
        f_max=np.array([1e9, 1e9]), p_max=np.array([0.5, 0.5]),
        cycles_per_bit=np.array([737.5, 737.5]))
    q = np.array([1e4, 2e4])
    h = np.array([2e-13, 1e-13])
    decide_slot(ctx, q, h)
    solve_offloading(q, h, 1e9, 1e-3, 1e7, N0_REF, ctx.p_max, 1e-4)
    bandwidth_allocation(q, np.array([0.1, 0.2]), h, 1e7, 1e-3, N0_REF, 1e-4)
    bandwidth_claim(1e6, 1e4, 0.1, 2e-13, 1e7, 1e-3, N0_REF, 1e-4)
