"""Seeded substreams: reproducibility, independence, and distributions."""

import numpy as np
import pytest

from conftest import G150_REF
from mecsim.model import parse_config
from mecsim.stochastic import (
    ARRIVAL_TAG,
    FADING_TAG,
    ArrivalProcess,
    FadingProcess,
    device_rng,
    make_streams,
)


def test_device_rng_is_reproducible():
    a = device_rng(7, 3, ARRIVAL_TAG).uniform(size=100)
    b = device_rng(7, 3, ARRIVAL_TAG).uniform(size=100)
    assert np.array_equal(a, b)


def test_device_rng_streams_differ():
    base = device_rng(7, 3, ARRIVAL_TAG).uniform(size=100)
    for seed, dev, tag in [(8, 3, ARRIVAL_TAG), (7, 2, ARRIVAL_TAG),
                           (7, 3, FADING_TAG)]:
        other = device_rng(seed, dev, tag).uniform(size=100)
        assert not np.array_equal(base, other)


def test_arrivals_unchanged_by_fleet_size():
    # a device's sample path must not depend on how many peers exist
    small = ArrivalProcess(seed=1, arrival_max=(4000.0,)).sample(50)
    large = ArrivalProcess(seed=1, arrival_max=(4000.0, 8000.0, 4000.0)).sample(50)
    assert np.array_equal(small[:, 0], large[:, 0])


def test_arrivals_bounds_and_mean():
    proc = ArrivalProcess(seed=3, arrival_max=(4000.0, 8000.0))
    draws = proc.sample(200_000)
    assert draws.shape == (200_000, 2)
    assert np.all(draws >= 0.0)
    assert np.all(draws[:, 0] <= 4000.0) and np.all(draws[:, 1] <= 8000.0)
    assert np.mean(draws[:, 0]) == pytest.approx(2000.0, rel=0.02)
    assert np.mean(draws[:, 1]) == pytest.approx(4000.0, rel=0.02)
    assert np.array_equal(proc.mean_rates(), [2000.0, 4000.0])


def test_fading_mean_matches_pathloss_scaling():
    proc = FadingProcess(seed=5, pathlosses=(G150_REF, 2.0 * G150_REF),
                         fading_means=(1.0, 0.5))
    draws = proc.sample(200_000)
    assert np.all(draws > 0.0)
    assert np.mean(draws[:, 0]) == pytest.approx(G150_REF, rel=0.02)
    assert np.mean(draws[:, 1]) == pytest.approx(G150_REF, rel=0.02)


def test_fading_accepts_injected_sampler():
    ones = lambda rng, size: np.ones(size)
    proc = FadingProcess(seed=5, pathlosses=(G150_REF,), fading_means=(2.0,),
                         sampler=ones)
    draws = proc.sample(10)
    assert np.allclose(draws, 2.0 * G150_REF, rtol=1e-15)


def test_make_streams_wires_configs(base_raw):
    parsed = parse_config(base_raw)
    arrivals, fading = make_streams(parsed.system, parsed.devices)
    assert arrivals.seed == parsed.system.rng_seed
    assert arrivals.arrival_max == tuple(d.arrival_max for d in parsed.devices)
    assert fading.pathlosses[0] == pytest.approx(G150_REF, rel=1e-12)
    a = arrivals.sample(20)
    g = fading.sample(20)
    assert a.shape == (20, 5) and g.shape == (20, 5)
    # same seed, same draws
    a2, g2 = (s.sample(20) for s in make_streams(parsed.system, parsed.devices))
    assert np.array_equal(a, a2) and np.array_equal(g, g2)
