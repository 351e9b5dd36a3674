"""Per-slot control: queue-weighted cost minimization in (f, p, alpha).

Each slot the controller picks CPU frequencies, transmit powers, and
bandwidth fractions to minimize

    sum_i [ V * (p_i + kappa * f_i^3) - Q_i * (D_l,i + D_r,i) ]

subject to box constraints on f and p and the bandwidth simplex
{alpha_i >= eps_bw, sum alpha <= 1}.  The frequency and power parts have
closed forms; bandwidth is allocated by bisecting the simplex multiplier
until the per-device claims sum to one.  The power/bandwidth pair is
resolved by alternating the two exact updates until the objective settles.

The hot path is compiled with numba; the public array functions below are
thin numpy implementations of the same formulas, cross-checked against the
kernels in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from numba import njit

from mecsim.model import (
    DeviceConfig,
    SlotDecision,
    SystemConfig,
    local_departure,
    local_power,
    remote_departure,
)

__all__ = [
    "ALG_XI",
    "ALG_IMAX",
    "ALG_BETA",
    "ROOT_LO",
    "ROOT_TOL",
    "GS_TOL",
    "GS_MAX_ALTERNATIONS",
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
]

_LN2 = math.log(2.0)

# bandwidth bisection constants
ALG_XI = 1e-7        # |sum alpha - 1| termination tolerance
ALG_IMAX = 200       # bisection iteration cap
ALG_BETA = 1.5       # multiplier growth factor for the upper bracket
ROOT_LO = 1e-9       # lower end of the per-device claim bracket
ROOT_TOL = 1e-10     # absolute tolerance of the per-device claim root
ROOT_RTOL = 1e-6     # relative width at which the closing secant takes over

# power/bandwidth alternation constants
GS_TOL = 1e-9               # relative objective change at convergence
GS_MAX_ALTERNATIONS = 100

_X_SERIES = 1e-2     # switch point between series and direct marginal rate

ArrayLike = Union[float, Sequence[float], np.ndarray]


# ---------------------------------------------------------------------------
# numpy reference implementations (public API)
# ---------------------------------------------------------------------------

def _phi_np(x: np.ndarray) -> np.ndarray:
    # log2(1+x) - x/((1+x)*ln2), the per-Hz marginal spectral value.
    # Direct evaluation cancels catastrophically for small x, so switch to
    # the series x^2/2 - 2x^3/3 + 3x^4/4 - ... below _X_SERIES.
    x = np.asarray(x, dtype=float)
    xs = np.minimum(x, _X_SERIES)
    series = xs * xs * (
        1.0 / 2.0 + xs * (-2.0 / 3.0 + xs * (3.0 / 4.0 + xs * (
            -4.0 / 5.0 + xs * (5.0 / 6.0 + xs * (-6.0 / 7.0 + xs * (7.0 / 8.0))))))
    )
    direct = np.log1p(x) - x / (1.0 + x)
    return np.where(x < _X_SERIES, series, direct) / _LN2


def cpu_frequency(queues: ArrayLike, v: float, tau: float, kappa: float,
                  cycles_per_bit: ArrayLike, f_max: ArrayLike) -> np.ndarray:
    """Optimal CPU frequency: sqrt(Q*tau/(3*kappa*V*L)), clipped to [0, f_max].

    Balances V times the cubic CPU power against Q times the local service
    rate tau*f/L.  Zero queue means zero frequency.
    """
    q = np.asarray(queues, dtype=float)
    f = np.sqrt(q * tau / (3.0 * kappa * v * np.asarray(cycles_per_bit, dtype=float)))
    return np.minimum(f, f_max)


def transmit_power(queues: ArrayLike, bw_fracs: ArrayLike, gains: ArrayLike,
                   v: float, tau: float, w: float, n0: float,
                   p_max: ArrayLike) -> np.ndarray:
    """Optimal transmit power for fixed bandwidth fractions.

    Water-filling against the inverse normalized gain:
    p = alpha*w*max(Q*tau/(V*ln2) - N0/H, 0), clipped to p_max.  Devices
    whose water level Q*tau/(V*ln2) sits below the noise floor N0/H stay
    silent.
    """
    q = np.asarray(queues, dtype=float)
    alpha = np.asarray(bw_fracs, dtype=float)
    h = np.asarray(gains, dtype=float)
    level = q * tau / (_LN2 * v)
    floor = np.divide(n0, h, out=np.full(np.shape(h), np.inf), where=h > 0)
    gap = np.maximum(level - floor, 0.0)
    return np.minimum(alpha * w * gap, p_max)


def marginal_rate(bw_fracs: ArrayLike, tx_powers: ArrayLike, gains: ArrayLike,
                  w: float, tau: float, n0: float):
    """Derivative of per-slot offloaded bits with respect to the bandwidth
    fraction: w*tau*[log2(1+x) - x/((1+x)*ln2)] with x = H*p/(alpha*N0*w).

    Strictly decreasing in alpha and unbounded as alpha -> 0 whenever p > 0;
    identically zero when p = 0.
    """
    alpha = np.asarray(bw_fracs, dtype=float)
    p = np.asarray(tx_powers, dtype=float)
    h = np.asarray(gains, dtype=float)
    c = h * p / (n0 * w)
    out_shape = np.broadcast(alpha, c).shape
    x = np.divide(c, alpha, out=np.zeros(out_shape), where=alpha > 0)
    mr = w * tau * _phi_np(x)
    # zero bandwidth with power on the air: infinite marginal value
    mr = np.where((alpha <= 0) & (c > 0), np.inf, mr)
    if mr.ndim == 0:
        return float(mr)
    return mr


# ---------------------------------------------------------------------------
# compiled kernels (hot path)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _phi(x: float) -> float:
    if x < _X_SERIES:
        s = x * x * (
            1.0 / 2.0 + x * (-2.0 / 3.0 + x * (3.0 / 4.0 + x * (
                -4.0 / 5.0 + x * (5.0 / 6.0 + x * (-6.0 / 7.0 + x * (7.0 / 8.0))))))
        )
        return s / _LN2
    return (math.log1p(x) - x / (1.0 + x)) / _LN2


@njit(cache=True)
def _cpu_freq_scalar(q: float, v: float, tau: float, kappa: float,
                     cpb: float, f_max: float) -> float:
    if q <= 0.0:
        return 0.0
    f = math.sqrt(q * tau / (3.0 * kappa * v * cpb))
    return f if f < f_max else f_max


@njit(cache=True)
def _tx_power_scalar(q: float, alpha: float, h: float, v: float, tau: float,
                     w: float, n0: float, p_max: float) -> float:
    if q <= 0.0 or alpha <= 0.0 or h <= 0.0:
        return 0.0
    gap = q * tau / (_LN2 * v) - n0 / h
    if gap <= 0.0:
        return 0.0
    p = alpha * w * gap
    return p if p < p_max else p_max


@njit(cache=True)
def _remote_dep_scalar(alpha: float, p: float, h: float, w: float, tau: float,
                       n0: float) -> float:
    if alpha <= 0.0 or p <= 0.0:
        return 0.0
    return alpha * w * tau * math.log2(1.0 + h * p / (alpha * n0 * w))


@njit(cache=True)
def _remote_objective(q, p, alpha, h, v: float, tau: float, w: float,
                      n0: float) -> float:
    # V*sum(p) - sum(Q*D_r): the part of the slot cost that couples p and alpha
    j = 0.0
    for i in range(q.size):
        j += v * p[i] - q[i] * _remote_dep_scalar(alpha[i], p[i], h[i], w, tau, n0)
    return j


@njit(cache=True)
def _claim_root(q: float, c: float, w_tau: float, lam: float) -> float:
    # alpha in [ROOT_LO, 1] where q * w_tau * phi(c/alpha) = lam; the claim
    # is decreasing in alpha, so clamp to 1 when even full bandwidth claims
    # at least lam, and to ROOT_LO when no bracket exists.
    if q * w_tau * _phi(c) >= lam:
        return 1.0
    lo = ROOT_LO
    hi = 1.0
    if q * w_tau * _phi(c / lo) <= lam:
        return lo
    # close the bracket in absolute and in relative width: near alpha = 0 the
    # claim curve is so steep that only a relatively tight bracket lets the
    # closing secant push the claim residual below 1e-6 of the multiplier
    while hi - lo >= ROOT_TOL or hi - lo >= ROOT_RTOL * lo:
        mid = 0.5 * (lo + hi)
        if q * w_tau * _phi(c / mid) >= lam:
            lo = mid
        else:
            hi = mid
    # secant step across the final bracket sharpens the root well past the
    # bisection tolerance at the cost of two extra evaluations
    g_lo = q * w_tau * _phi(c / lo) - lam
    g_hi = q * w_tau * _phi(c / hi) - lam
    if g_lo > g_hi:
        return lo + (hi - lo) * (g_lo / (g_lo - g_hi))
    return 0.5 * (lo + hi)


@njit(cache=True)
def _claim_root_warm(q: float, c: float, w_tau: float, lam: float,
                     claim_at_1: float, claim_at_lo: float,
                     lo0: float, hi0: float, clo0: float, chi0: float) -> float:
    # Same root as _claim_root but with the full-band and floor claims
    # precomputed and the bisection started from a caller-supplied bracket.
    # clo0/chi0 cache the claims at the bracket ends; NaN means unknown, in
    # which case the end is evaluated.  The claim is decreasing in alpha, so
    # a valid bracket satisfies claim(lo) >= lam >= claim(hi); a stale
    # endpoint is detected by its sign and replaced with the hard bound.
    if claim_at_1 >= lam:
        return 1.0
    if claim_at_lo <= lam:
        return ROOT_LO
    lo = lo0
    hi = hi0
    if lo <= ROOT_LO:
        lo = ROOT_LO
        g_lo = claim_at_lo - lam
    elif clo0 == clo0:
        g_lo = clo0 - lam
    else:
        g_lo = q * w_tau * _phi(c / lo) - lam
    if hi >= 1.0:
        hi = 1.0
        g_hi = claim_at_1 - lam
    elif chi0 == chi0:
        g_hi = chi0 - lam
    else:
        g_hi = q * w_tau * _phi(c / hi) - lam
    if lo >= hi:
        lo = ROOT_LO
        g_lo = claim_at_lo - lam
        hi = 1.0
        g_hi = claim_at_1 - lam
    if g_lo < 0.0:
        # root lies below the supplied bracket
        hi = lo
        g_hi = g_lo
        lo = ROOT_LO
        g_lo = claim_at_lo - lam
    elif g_hi > 0.0:
        # root lies above the supplied bracket
        lo = hi
        g_lo = g_hi
        hi = 1.0
        g_hi = claim_at_1 - lam
    while hi - lo >= ROOT_TOL and hi - lo >= ROOT_RTOL * lo:
        mid = 0.5 * (lo + hi)
        g = q * w_tau * _phi(c / mid) - lam
        if g >= 0.0:
            lo = mid
            g_lo = g
        else:
            hi = mid
            g_hi = g
    if g_lo > g_hi:
        return lo + (hi - lo) * (g_lo / (g_lo - g_hi))
    return 0.5 * (lo + hi)


@njit(cache=True)
def _claims_eval(q, c, active, order, claim_at_1, claim_at_lo, w_tau: float,
                 eps_a: float, lam: float, blo, bhi, bclo, bchi,
                 out_alpha, out_roots) -> float:
    # Scan devices from the largest full-band claim down and stop as soon as
    # the running total reaches one: the remaining claims can only push it
    # further up, and termination at this probe is already impossible
    # because each unvisited device adds at least eps_a.  Roots of skipped
    # devices are marked NaN so their cached brackets stay untouched.
    n = q.size
    s = 0.0
    for k in range(n):
        i = order[k]
        if active[i]:
            r = _claim_root_warm(q[i], c[i], w_tau, lam, claim_at_1[i],
                                 claim_at_lo[i], blo[i], bhi[i], bclo[i],
                                 bchi[i])
            out_roots[i] = r
            a = r if r >= eps_a else eps_a
        else:
            out_roots[i] = eps_a
            a = eps_a
        out_alpha[i] = a
        s += a
        if s >= 1.0 and k + 1 < n:
            for k2 in range(k + 1, n):
                out_roots[order[k2]] = np.nan
            return s
    return s


@njit(cache=True)
def _store_bracket(n, active, roots, claim_at_1, claim_at_lo, lam, bnd,
                   bclaim):
    # Record this probe's roots as bounds for later probes.  A root's claim
    # equals the probed multiplier up to the root residual; clamped roots
    # carry their exact claims.  NaN roots were not evaluated at this probe.
    for i in range(n):
        if not active[i]:
            continue
        r = roots[i]
        if r != r:
            continue
        bnd[i] = r
        if r == 1.0:
            bclaim[i] = claim_at_1[i]
        elif r == ROOT_LO:
            bclaim[i] = claim_at_lo[i]
        else:
            bclaim[i] = lam


@njit(cache=True)
def _bandwidth_kernel_warm(q, p, h, w: float, tau: float, n0: float,
                           eps_a: float, blo, bhi, bclo, bchi,
                           use_state: bool, out_alpha):
    n = q.size
    w_tau = w * tau
    c = np.empty(n)
    active = np.empty(n, dtype=np.bool_)
    claim_at_1 = np.empty(n)
    claim_at_lo = np.empty(n)
    lam0 = 0.0
    any_claim = False
    for i in range(n):
        c[i] = h[i] * p[i] / (n0 * w)
        claim = q[i] * w_tau * _phi(c[i]) if (p[i] > 0.0 and q[i] > 0.0) else 0.0
        claim_at_1[i] = claim
        active[i] = claim > 0.0
        if claim > lam0:
            lam0 = claim
        if active[i]:
            any_claim = True
    if not any_claim or lam0 <= 0.0:
        for i in range(n):
            out_alpha[i] = 1.0 / n
        return True, 0.0
    for i in range(n):
        claim_at_lo[i] = (q[i] * w_tau * _phi(c[i] / ROOT_LO)
                          if active[i] else 0.0)
    if not use_state:
        for i in range(n):
            blo[i] = ROOT_LO
            bhi[i] = 1.0
    # Cached bound claims are only meaningful under this call's powers, so
    # they always start unknown; bounds may persist between calls because a
    # stale bound is caught by its claim's sign and costs at most one extra
    # evaluation, never the answer.
    for i in range(n):
        bclo[i] = np.nan
        bchi[i] = np.nan
    order = np.argsort(-claim_at_1)

    # Roots are decreasing in the multiplier, so roots found at one probe
    # bracket the roots at later probes; blo/bhi carry those bounds between
    # probes together with the claims at the bound points.
    roots = np.empty(n)
    alpha_hi = np.empty(n)

    # bracket the multiplier: grow the upper end until claims fit in the band
    lam_lo = lam0
    lam_hi = lam0
    grow = 0
    while True:
        s = _claims_eval(q, c, active, order, claim_at_1, claim_at_lo, w_tau,
                         eps_a, lam_hi, blo, bhi, bclo, bchi, out_alpha,
                         roots)
        if s < 1.0:
            _store_bracket(n, active, roots, claim_at_1, claim_at_lo, lam_hi,
                           blo, bclo)
            for i in range(n):
                alpha_hi[i] = out_alpha[i]
            break
        _store_bracket(n, active, roots, claim_at_1, claim_at_lo, lam_hi,
                       bhi, bchi)
        lam_hi *= ALG_BETA
        grow += 1
        if grow > ALG_IMAX:
            for i in range(n):
                out_alpha[i] = 1.0 / n
            return False, lam_hi

    # bisect; terminate only on the feasible side of the band constraint
    it = 0
    while it <= ALG_IMAX:
        lam_mid = 0.5 * (lam_lo + lam_hi)
        s = _claims_eval(q, c, active, order, claim_at_1, claim_at_lo, w_tau,
                         eps_a, lam_mid, blo, bhi, bclo, bchi, out_alpha,
                         roots)
        if abs(s - 1.0) < ALG_XI and s <= 1.0:
            return True, lam_mid
        if s >= 1.0:
            lam_lo = lam_mid
            _store_bracket(n, active, roots, claim_at_1, claim_at_lo,
                           lam_mid, bhi, bchi)
        else:
            lam_hi = lam_mid
            _store_bracket(n, active, roots, claim_at_1, claim_at_lo,
                           lam_mid, blo, bclo)
            for i in range(n):
                alpha_hi[i] = out_alpha[i]
        it += 1
    # iteration cap: fall back to the upper-bracket iterate, which is the
    # last feasible one
    for i in range(n):
        out_alpha[i] = alpha_hi[i]
    return False, lam_hi


@njit(cache=True)
def _bandwidth_kernel(q, p, h, w: float, tau: float, n0: float, eps_a: float,
                      out_alpha):
    n = q.size
    blo = np.empty(n)
    bhi = np.empty(n)
    bclo = np.empty(n)
    bchi = np.empty(n)
    return _bandwidth_kernel_warm(q, p, h, w, tau, n0, eps_a, blo, bhi, bclo,
                                  bchi, False, out_alpha)


@njit(cache=True)
def _gs_kernel(q, h, v: float, tau: float, w: float, n0: float, p_max,
               eps_a: float, out_p, out_alpha) -> bool:
    # alternate exact power and bandwidth updates from a uniform split;
    # each update can only lower the objective, so the sequence settles
    n = q.size
    for i in range(n):
        out_alpha[i] = 1.0 / n
    cand = np.empty(n)
    # per-device root brackets reused across alternations (powers move less
    # and less between rounds, so the brackets tighten as the pair settles)
    blo = np.empty(n)
    bhi = np.empty(n)
    bclo = np.empty(n)
    bchi = np.empty(n)
    j_prev = 0.0
    have_prev = False
    for _ in range(GS_MAX_ALTERNATIONS):
        for i in range(n):
            out_p[i] = _tx_power_scalar(q[i], out_alpha[i], h[i], v, tau, w,
                                        n0, p_max[i])
        any_pos = False
        for i in range(n):
            if out_p[i] > 0.0:
                any_pos = True
                break
        if not any_pos:
            # nothing on the air: bandwidth is irrelevant, keep the even split
            for i in range(n):
                out_alpha[i] = 1.0 / n
            return True
        j_cur = _remote_objective(q, out_p, out_alpha, h, v, tau, w, n0)
        _bandwidth_kernel_warm(q, out_p, h, w, tau, n0, eps_a, blo, bhi,
                               bclo, bchi, have_prev, cand)
        j_cand = _remote_objective(q, out_p, cand, h, v, tau, w, n0)
        # guard: bisection tolerance must never push the objective uphill
        if j_cand <= j_cur:
            for i in range(n):
                out_alpha[i] = cand[i]
            j_new = j_cand
        else:
            j_new = j_cur
        if have_prev and abs(j_new - j_prev) <= GS_TOL * abs(j_prev):
            return True
        j_prev = j_new
        have_prev = True
    return False


@njit(cache=True)
def _decide_slot_kernel(q, h, v: float, tau: float, w: float, n0: float,
                        kappa: float, eps_a: float, f_max, cpb, p_max,
                        out_f, out_p, out_alpha) -> bool:
    for i in range(q.size):
        out_f[i] = _cpu_freq_scalar(q[i], v, tau, kappa, cpb[i], f_max[i])
    return _gs_kernel(q, h, v, tau, w, n0, p_max, eps_a, out_p, out_alpha)


# ---------------------------------------------------------------------------
# public solver entry points
# ---------------------------------------------------------------------------

def bandwidth_claim(lam: float, queue: float, tx_power: float, gain: float,
                    w: float, tau: float, n0: float, eps_bw: float) -> float:
    """Bandwidth fraction a single device claims at multiplier `lam`.

    The unique alpha in [1e-9, 1] where the queue-weighted marginal rate
    equals lam, clamped to 1 when even full bandwidth is worth more than
    lam.  A silent or empty device claims the floor eps_bw by convention.
    Non-increasing in lam.
    """
    if tx_power <= 0.0 or queue <= 0.0 or gain <= 0.0:
        return eps_bw
    c = gain * tx_power / (n0 * w)
    return float(_claim_root(queue, c, w * tau, lam))


def bandwidth_allocation(queues: ArrayLike, tx_powers: ArrayLike,
                         gains: ArrayLike, w: float, tau: float, n0: float,
                         eps_bw: float) -> tuple[np.ndarray, float, bool]:
    """Split the band to maximize sum_i Q_i * D_r,i at fixed powers.

    Bisects the simplex multiplier: each device claims the fraction at which
    its queue-weighted marginal rate equals the multiplier (floored at
    eps_bw), and the multiplier moves until claims total one.  Devices with
    no power or no backlog claim the floor.  With no claimants at all the
    split is uniform.  Returns (fractions, multiplier, converged).
    """
    q = np.ascontiguousarray(queues, dtype=float)
    p = np.ascontiguousarray(tx_powers, dtype=float)
    h = np.ascontiguousarray(gains, dtype=float)
    alpha = np.empty(q.size)
    ok, lam = _bandwidth_kernel(q, p, h, w, tau, n0, eps_bw, alpha)
    return alpha, float(lam), bool(ok)


def offloading_objective(queues: ArrayLike, tx_powers: ArrayLike,
                         bw_fracs: ArrayLike, gains: ArrayLike, v: float,
                         tau: float, w: float, n0: float) -> float:
    """Remote part of the slot cost: V*sum(p) - sum(Q*D_r)."""
    q = np.ascontiguousarray(queues, dtype=float)
    p = np.ascontiguousarray(tx_powers, dtype=float)
    alpha = np.ascontiguousarray(bw_fracs, dtype=float)
    h = np.ascontiguousarray(gains, dtype=float)
    return float(_remote_objective(q, p, alpha, h, v, tau, w, n0))


def slot_objective(ctx: "ControlContext", queues: ArrayLike, gains: ArrayLike,
                   decision: SlotDecision) -> float:
    """Full slot cost of a decision: V*P_total - sum_i Q_i*(D_l,i + D_r,i)."""
    q = np.asarray(queues, dtype=float)
    h = np.asarray(gains, dtype=float)
    d_l = local_departure(decision.freqs, ctx.tau, ctx.cycles_per_bit)
    d_r = remote_departure(decision.bw_fracs, decision.tx_powers, h, ctx.w,
                           ctx.tau, ctx.n0)
    power = np.sum(decision.tx_powers) + np.sum(
        local_power(decision.freqs, ctx.kappa))
    return float(ctx.v * power - np.sum(q * (d_l + d_r)))


def solve_offloading(queues: ArrayLike, gains: ArrayLike, v: float, tau: float,
                     w: float, n0: float, p_max: ArrayLike,
                     eps_bw: float) -> tuple[np.ndarray, np.ndarray, bool]:
    """Jointly pick transmit powers and bandwidth fractions.

    Alternates the closed-form power update with the bandwidth allocation,
    starting from a uniform split, until the relative objective change drops
    below GS_TOL or GS_MAX_ALTERNATIONS is hit.  The objective never
    increases along the way.  Returns (powers, fractions, converged).
    """
    q = np.ascontiguousarray(queues, dtype=float)
    h = np.ascontiguousarray(gains, dtype=float)
    pmax = np.ascontiguousarray(np.broadcast_to(
        np.asarray(p_max, dtype=float), q.shape))
    p = np.empty(q.size)
    alpha = np.empty(q.size)
    ok = _gs_kernel(q, h, v, tau, w, n0, pmax, eps_bw, p, alpha)
    return p, alpha, bool(ok)


@dataclass(frozen=True)
class ControlContext:
    """Unpacked per-device constant arrays for the per-slot solver."""

    v: float
    tau: float
    w: float
    n0: float
    kappa: float
    eps_bw: float
    f_max: np.ndarray
    p_max: np.ndarray
    cycles_per_bit: np.ndarray

    @classmethod
    def from_config(cls, system: SystemConfig,
                    devices: Sequence[DeviceConfig]) -> "ControlContext":
        return cls(
            v=system.control_v,
            tau=system.slot_len,
            w=system.bandwidth,
            n0=system.noise_psd,
            kappa=system.switched_cap,
            eps_bw=system.eps_bw,
            f_max=np.array([d.f_max for d in devices]),
            p_max=np.array([d.p_max for d in devices]),
            cycles_per_bit=np.array([d.cycles_per_bit for d in devices]),
        )


def decide_slot(ctx: ControlContext, queues: ArrayLike,
                gains: ArrayLike) -> SlotDecision:
    """One slot's full control action for the observed queues and gains."""
    q = np.ascontiguousarray(queues, dtype=float)
    h = np.ascontiguousarray(gains, dtype=float)
    f = np.empty(q.size)
    p = np.empty(q.size)
    alpha = np.empty(q.size)
    ok = _decide_slot_kernel(q, h, ctx.v, ctx.tau, ctx.w, ctx.n0, ctx.kappa,
                             ctx.eps_bw, ctx.f_max, ctx.cycles_per_bit,
                             ctx.p_max, f, p, alpha)
    return SlotDecision(freqs=f, tx_powers=p, bw_fracs=alpha, converged=bool(ok))
