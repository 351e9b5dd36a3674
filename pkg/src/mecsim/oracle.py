"""Brute-force reference solvers for certifying the controller.

These enumerate dense grids and report the grid optimum, trusting nothing
about the controller's closed forms or bisection beyond the model equations
themselves (the power grid even re-derives the rate from the model op).
They are deliberately slow and are never used in the simulation hot path;
the test suite and the `verify` CLI subcommand are the only consumers.
"""

from __future__ import annotations

import math
from decimal import Decimal, localcontext
from typing import Sequence

import numpy as np

from mecsim.controller import marginal_rate, transmit_power
from mecsim.model import local_departure, local_power, remote_departure

__all__ = [
    "ComplexityError",
    "MAX_GRID_DEVICES",
    "fd_marginal_rate",
    "grid_cpu_frequency",
    "grid_tx_power",
    "grid_bandwidth",
    "grid_offloading",
    "offloading_grid_slack",
]

MAX_GRID_DEVICES = 4
_MAX_GRID_POINTS = 20_000_000


class ComplexityError(ValueError):
    """Requested grid enumeration is too large to be a practical oracle."""


def grid_cpu_frequency(queue: float, v: float, tau: float, kappa: float,
                       cycles_per_bit: float, f_max: float,
                       grid_points: int = 10_000) -> tuple[float, float]:
    """Exhaustive minimum of V*kappa*f^3 - Q*tau*f/L over a uniform
    frequency grid on [0, f_max].  Returns (frequency, objective)."""
    if grid_points < 1000:
        raise ValueError(f"grid_points must be >= 1000, got {grid_points}")
    f = np.linspace(0.0, f_max, grid_points)
    obj = v * local_power(f, kappa) - queue * local_departure(f, tau, cycles_per_bit)
    k = int(np.argmin(obj))
    return float(f[k]), float(obj[k])


def grid_tx_power(queue: float, bw_frac: float, gain: float, v: float,
                  tau: float, w: float, n0: float, p_max: float,
                  grid_points: int = 10_000) -> tuple[float, float]:
    """Exhaustive minimum of V*p - Q*D_r(alpha, p) over a uniform power grid
    on [0, p_max] at fixed bandwidth fraction.  Returns (power, objective)."""
    if grid_points < 1000:
        raise ValueError(f"grid_points must be >= 1000, got {grid_points}")
    p = np.linspace(0.0, p_max, grid_points)
    obj = v * p - queue * remote_departure(bw_frac, p, gain, w, tau, n0)
    k = int(np.argmin(obj))
    return float(p[k]), float(obj[k])


def _band_face_grid(n: int, eps_bw: float, alpha_step: float) -> np.ndarray:
    # Lattice over the full-band face {sum alpha = 1, alpha_i >= eps_bw}:
    # the first n-1 fractions take values eps_bw + k*alpha_step and the last
    # absorbs the remainder.  The face is where any optimum of a rate
    # objective non-decreasing in every alpha_i lives, which keeps the
    # enumeration tractable at fine steps.
    if n > MAX_GRID_DEVICES:
        raise ComplexityError(
            f"simplex grid enumeration supports at most {MAX_GRID_DEVICES} "
            f"devices, got {n}")
    if alpha_step > 1e-2:
        raise ValueError(f"alpha_step must be <= 1e-2, got {alpha_step}")
    if n == 1:
        return np.array([[1.0]])
    k_max = int(math.floor((1.0 - n * eps_bw) / alpha_step)) + 1
    if k_max ** (n - 1) > _MAX_GRID_POINTS:
        raise ComplexityError(
            f"alpha grid would need {k_max ** (n - 1)} points; "
            f"coarsen alpha_step")
    vals = eps_bw + alpha_step * np.arange(k_max)
    grids = np.meshgrid(*([vals] * (n - 1)), indexing="ij")
    head = np.stack([g.ravel() for g in grids], axis=1)
    last = 1.0 - head.sum(axis=1)
    keep = last >= eps_bw
    return np.column_stack([head[keep], last[keep]])


def grid_bandwidth(queues: Sequence[float], tx_powers: Sequence[float],
                   gains: Sequence[float], w: float, tau: float, n0: float,
                   eps_bw: float,
                   alpha_step: float = 1e-3) -> tuple[np.ndarray, float]:
    """Exhaustive maximum of sum_i Q_i * D_r,i over the bandwidth simplex at
    fixed powers.  Returns (fractions, weighted offloaded bits)."""
    q = np.asarray(queues, dtype=float)
    p = np.asarray(tx_powers, dtype=float)
    h = np.asarray(gains, dtype=float)
    alphas = _band_face_grid(q.size, eps_bw, alpha_step)
    value = np.zeros(alphas.shape[0])
    for i in range(q.size):
        value += q[i] * remote_departure(alphas[:, i], p[i], h[i], w, tau, n0)
    k = int(np.argmax(value))
    return alphas[k].copy(), float(value[k])


def grid_offloading(queues: Sequence[float], gains: Sequence[float], v: float,
                    tau: float, w: float, n0: float,
                    p_max: Sequence[float], eps_bw: float,
                    alpha_step: float = 1e-2
                    ) -> tuple[np.ndarray, np.ndarray, float]:
    """Joint power/bandwidth reference: enumerate the bandwidth lattice and,
    at each point, use the exact per-device power that is optimal for that
    fixed fraction (the power subproblem is separable, so the grid is the
    only approximation).  Returns (powers, fractions, objective)."""
    q = np.asarray(queues, dtype=float)
    h = np.asarray(gains, dtype=float)
    pm = np.broadcast_to(np.asarray(p_max, dtype=float), q.shape)
    alphas = _band_face_grid(q.size, eps_bw, alpha_step)
    obj = np.zeros(alphas.shape[0])
    powers = np.empty_like(alphas)
    for i in range(q.size):
        p_i = transmit_power(q[i], alphas[:, i], h[i], v, tau, w, n0, pm[i])
        powers[:, i] = p_i
        obj += v * p_i - q[i] * remote_departure(alphas[:, i], p_i, h[i], w,
                                                 tau, n0)
    k = int(np.argmin(obj))
    return powers[k].copy(), alphas[k].copy(), float(obj[k])


def fd_marginal_rate(bw_frac: float, tx_power: float, gain: float, w: float,
                     tau: float, n0: float, rel_step: float = 1e-8) -> float:
    """Central difference of the offloaded bits in the bandwidth fraction,
    evaluated in 50-digit arithmetic.  At weak channels the rate is nearly
    flat in the fraction, and a double-precision difference would measure
    cancellation noise instead of the slope."""
    with localcontext() as dctx:
        dctx.prec = 50
        a = Decimal(bw_frac)
        c = Decimal(gain) * Decimal(tx_power) / (Decimal(n0) * Decimal(w))
        w_tau = Decimal(w) * Decimal(tau)
        ln2 = Decimal(2).ln()

        def rate(x: Decimal) -> Decimal:
            return x * w_tau * (1 + c / x).ln() / ln2

        step = a * Decimal(rel_step)
        return float((rate(a + step) - rate(a - step)) / (2 * step))


def offloading_grid_slack(queues: Sequence[float], gains: Sequence[float],
                          p_max: Sequence[float], w: float, tau: float,
                          n0: float, eps_bw: float, alpha_step: float) -> float:
    """Upper bound on how far the bandwidth lattice optimum can sit above the
    true optimum: one lattice step times a Lipschitz bound of the objective
    in each fraction (the queue-weighted marginal rate at the floor, where
    it is largest, evaluated at full power, where it is largest)."""
    q = np.asarray(queues, dtype=float)
    h = np.asarray(gains, dtype=float)
    pm = np.broadcast_to(np.asarray(p_max, dtype=float), q.shape)
    lip = q * marginal_rate(eps_bw, pm, h, w, tau, n0)
    return float(alpha_step * np.sum(lip))
