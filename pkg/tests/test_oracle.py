"""Grid reference solvers: contracts, guards, and closed-form domination."""

import numpy as np
import pytest

from conftest import G150_REF, N0_REF
from mecsim.controller import (
    cpu_frequency,
    marginal_rate,
    offloading_objective,
    solve_offloading,
    transmit_power,
)
from mecsim.model import local_departure, local_power, remote_departure
from mecsim.oracle import (
    ComplexityError,
    _band_face_grid,
    fd_marginal_rate,
    grid_bandwidth,
    grid_cpu_frequency,
    grid_offloading,
    grid_tx_power,
    offloading_grid_slack,
)

TAU, W = 1e-3, 1e7


def test_grid_solvers_reject_coarse_grids():
    with pytest.raises(ValueError, match="grid_points"):
        grid_cpu_frequency(1e4, 1e9, TAU, 1e-27, 737.5, 1e9, grid_points=100)
    with pytest.raises(ValueError, match="grid_points"):
        grid_tx_power(1e4, 0.5, G150_REF, 1e9, TAU, W, N0_REF, 0.5,
                      grid_points=100)


def test_fd_marginal_rate_matches_closed_form():
    # healthy operating point
    fd = fd_marginal_rate(0.25, 0.1, G150_REF, W, TAU, N0_REF)
    mr = float(marginal_rate(0.25, 0.1, G150_REF, W, TAU, N0_REF))
    assert fd == pytest.approx(mr, rel=1e-10)

    # weak channel at low power: the rate is almost flat in the fraction
    # and a double-precision central difference would return mostly noise;
    # the extended-precision one still resolves the slope
    h, p, alpha = G150_REF * 1e-6, 1e-3, 0.9
    fd = fd_marginal_rate(alpha, p, h, W, TAU, N0_REF)
    mr = float(marginal_rate(alpha, p, h, W, TAU, N0_REF))
    assert fd == pytest.approx(mr, rel=1e-10)
    naive = (remote_departure(alpha + 1e-8, p, h, W, TAU, N0_REF)
             - remote_departure(alpha - 1e-8, p, h, W, TAU, N0_REF)) / 2e-8
    assert abs(naive - mr) > 1e3 * abs(fd - mr)


def test_frequency_closed_form_dominates_grid():
    rng = np.random.default_rng(20)
    for _ in range(50):
        q = float(10.0 ** rng.uniform(2.0, 6.0))
        v = float(10.0 ** rng.uniform(6.0, 10.0))
        f_star = float(cpu_frequency(q, v, TAU, 1e-27, 737.5, 1e9))
        f_grid, obj_grid = grid_cpu_frequency(q, v, TAU, 1e-27, 737.5, 1e9)
        obj_star = (v * local_power(f_star, 1e-27)
                    - q * local_departure(f_star, TAU, 737.5))
        assert obj_star <= obj_grid + 1e-12 * abs(obj_grid)
        assert abs(f_star - f_grid) <= 1e9 / (10_000 - 1) + 1e-6


def test_power_closed_form_dominates_grid():
    rng = np.random.default_rng(21)
    for _ in range(50):
        q = float(10.0 ** rng.uniform(2.0, 6.0))
        v = float(10.0 ** rng.uniform(6.0, 10.0))
        alpha = float(rng.uniform(1e-4, 1.0))
        h = float(G150_REF * rng.exponential(1.0))
        p_star = float(transmit_power(q, alpha, h, v, TAU, W, N0_REF, 0.5))
        p_grid, obj_grid = grid_tx_power(q, alpha, h, v, TAU, W, N0_REF, 0.5)
        obj_star = v * p_star - q * remote_departure(alpha, p_star, h, W, TAU,
                                                     N0_REF)
        assert obj_star <= obj_grid + 1e-12 * max(1.0, abs(obj_grid))
        assert abs(p_star - p_grid) <= 0.5 / (10_000 - 1) + 1e-12


def test_face_grid_contract():
    one = _band_face_grid(1, 1e-4, 1e-2)
    assert np.array_equal(one, [[1.0]])
    lattice = _band_face_grid(3, 1e-3, 5e-3)
    assert np.all(lattice >= 1e-3 - 1e-15)
    assert np.allclose(lattice.sum(axis=1), 1.0, atol=1e-12)
    # first coordinates enumerate eps + k*step
    steps = np.unique(np.round((lattice[:, 0] - 1e-3) / 5e-3))
    assert np.allclose(steps, np.arange(steps.size))


def test_face_grid_guards():
    with pytest.raises(ComplexityError, match="devices"):
        _band_face_grid(5, 1e-4, 1e-2)
    with pytest.raises(ValueError, match="alpha_step"):
        _band_face_grid(3, 1e-4, 5e-2)
    with pytest.raises(ComplexityError, match="points"):
        _band_face_grid(4, 1e-7, 1e-4)


def test_grid_bandwidth_agrees_with_bisection():
    from mecsim.controller import bandwidth_allocation

    rng = np.random.default_rng(22)
    for _ in range(20):
        n = int(rng.integers(2, 4))
        q = 10.0 ** rng.uniform(2.0, 6.0, n)
        p = rng.uniform(0.05, 0.5, n)
        h = G150_REF * rng.exponential(1.0, n)
        alpha, _, ok = bandwidth_allocation(q, p, h, W, TAU, N0_REF, 1e-4)
        assert ok
        val = float(np.sum(q * remote_departure(alpha, p, h, W, TAU, N0_REF)))
        _, val_grid = grid_bandwidth(q, p, h, W, TAU, N0_REF, 1e-4,
                                     alpha_step=2e-3)
        slack = offloading_grid_slack(q, h, np.full(n, 0.5), W, TAU, N0_REF,
                                      1e-4, 2e-3)
        # the lattice can sit below the true optimum by at most the slack,
        # and never above the bisection result
        assert val >= val_grid - slack - 1e-6 * abs(val_grid)
        assert val_grid <= val + 1e-6 * abs(val)


def test_grid_offloading_brackets_joint_solver():
    rng = np.random.default_rng(23)
    for _ in range(15):
        n = int(rng.integers(1, 4))
        q = 10.0 ** rng.uniform(2.0, 6.0, n)
        h = G150_REF * rng.exponential(1.0, n)
        v = float(10.0 ** rng.uniform(6.0, 10.0))
        p, alpha, ok = solve_offloading(q, h, v, TAU, W, N0_REF, 0.5, 1e-4)
        assert ok
        obj = offloading_objective(q, p, alpha, h, v, TAU, W, N0_REF)
        _, _, obj_grid = grid_offloading(q, h, v, TAU, W, N0_REF,
                                         np.full(n, 0.5), 1e-4,
                                         alpha_step=5e-3)
        slack = offloading_grid_slack(q, h, np.full(n, 0.5), W, TAU, N0_REF,
                                      1e-4, 5e-3)
        assert obj <= obj_grid + 1e-6 * abs(obj_grid) + 1e-9
        assert obj_grid <= obj + slack + 1e-6 * abs(obj)


def test_grid_offloading_single_device_is_closed_form():
    q, h, v = np.array([5e4]), np.array([G150_REF]), 1e9
    p, alpha, obj = grid_offloading(q, h, v, TAU, W, N0_REF, np.array([0.5]),
                                    1e-4)
    assert np.array_equal(alpha, [1.0])
    want_p = float(transmit_power(q[0], 1.0, h[0], v, TAU, W, N0_REF, 0.5))
    assert p[0] == pytest.approx(want_p, rel=1e-14)
    assert obj == pytest.approx(
        offloading_objective(q, p, alpha, h, v, TAU, W, N0_REF), rel=1e-12)


def test_slack_scales_linearly_with_step():
    q = np.array([1e4, 1e5])
    h = np.full(2, G150_REF)
    pm = np.full(2, 0.5)
    s1 = offloading_grid_slack(q, h, pm, W, TAU, N0_REF, 1e-4, 1e-3)
    s2 = offloading_grid_slack(q, h, pm, W, TAU, N0_REF, 1e-4, 2e-3)
    assert s1 > 0.0
    assert s2 == pytest.approx(2.0 * s1, rel=1e-12)
