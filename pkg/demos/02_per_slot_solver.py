"""
Anatomy of one control slot
===========================

Given the queue backlogs and channel gains observed at the start of a
slot, the controller picks CPU frequencies, transmit powers, and a split
of the shared band.  This script walks through each piece: the two
closed forms, the multiplier that equalizes bandwidth value across
devices, and an exhaustive grid that certifies the joint solution.
"""

import numpy as np

from mecsim.controller import (
    ControlContext,
    bandwidth_allocation,
    cpu_frequency,
    decide_slot,
    marginal_rate,
    offloading_objective,
    slot_objective,
    solve_offloading,
    transmit_power,
)
from mecsim.model import parse_config, pathloss
from mecsim.oracle import (
    grid_cpu_frequency,
    grid_offloading,
    grid_tx_power,
    offloading_grid_slack,
)

raw = {
    "system": {"num_devices": 3, "tau_ms": 1.0, "w_MHz": 10.0,
               "N0_dBm_per_Hz": -174.0, "g0_dB": -40.0, "d0_m": 1.0,
               "theta": 4.0, "kappa": 1e-27, "V_bits2_per_W": 1e9,
               "eps_A": 1e-4, "horizon_slots": 5000, "seed": 1},
    "devices": {"distance_m": 150.0, "cycles_per_bit": 737.5,
                "f_max_GHz": 1.0, "p_max_mW": 500.0, "A_max_kbits": 4.0,
                "fading_mean": 1.0},
}
parsed = parse_config(raw)
sys_ = parsed.system
ctx = ControlContext.from_config(sys_, parsed.devices)

# a hand-picked state: one long queue on a strong channel, one long queue
# on a weak channel, one short queue
g150 = pathloss(sys_, 150.0)
queues = np.array([60000.0, 60000.0, 4000.0])
gains = g150 * np.array([2.5, 0.4, 1.0])

# --- piece 1: CPU frequency --------------------------------------------
# sqrt law against the cubic power curve, clipped at f_max; a fine grid
# over [0, f_max] never finds a lower local cost
f = cpu_frequency(queues, ctx.v, ctx.tau, ctx.kappa, ctx.cycles_per_bit,
                  ctx.f_max)
print("CPU frequencies (GHz):", np.round(f / 1e9, 4))
f_grid, _ = grid_cpu_frequency(queues[0], ctx.v, ctx.tau, ctx.kappa,
                               float(ctx.cycles_per_bit[0]),
                               float(ctx.f_max[0]))
print(f"  device 0 closed form {f[0]:.4e} Hz, best of 10^4 grid "
      f"{f_grid:.4e} Hz")

# --- piece 2: transmit power at a fixed split --------------------------
# water-filling with level Q*tau/(V*ln2) against the per-device noise
# floor N0/H, again certified by a grid at the same fixed split
alpha0 = np.full(3, 1.0 / 3.0)
p0 = transmit_power(queues, alpha0, gains, ctx.v, ctx.tau, ctx.w, ctx.n0,
                    ctx.p_max)
print("\npowers at the uniform split (mW):", np.round(p0 * 1e3, 3))
p_grid, _ = grid_tx_power(queues[0], alpha0[0], gains[0], ctx.v, ctx.tau,
                          ctx.w, ctx.n0, float(ctx.p_max[0]))
print(f"  device 0 closed form {p0[0] * 1e3:.4f} mW, best of 10^4 grid "
      f"{p_grid * 1e3:.4f} mW")

# --- piece 3: the bandwidth split at those powers -----------------------
# each device claims the fraction where its queue-weighted marginal rate
# equals a shared multiplier; bisection moves the multiplier until the
# claims add up to one
alpha, lam, ok = bandwidth_allocation(queues, p0, gains, ctx.w, ctx.tau,
                                      ctx.n0, ctx.eps_bw)
print("\nbandwidth split:", np.round(alpha, 4), " sum", alpha.sum())
value = queues * marginal_rate(alpha, p0, gains, ctx.w, ctx.tau, ctx.n0)
print("queue-weighted marginal rates:", np.round(value, 2))
print(f"shared multiplier: {lam:.2f}  (converged: {ok})")

# --- piece 4: alternating to the joint optimum --------------------------
# powers depend on the split and the split depends on the powers, so the
# solver alternates the two updates until the objective stops moving
p_star, a_star, ok = solve_offloading(queues, gains, ctx.v, ctx.tau, ctx.w,
                                      ctx.n0, ctx.p_max, ctx.eps_bw)
obj = offloading_objective(queues, p_star, a_star, gains, ctx.v, ctx.tau,
                           ctx.w, ctx.n0)
print("\njoint solution (converged:", str(ok) + ")")
print("  powers (mW):", np.round(p_star * 1e3, 3))
print("  split:      ", np.round(a_star, 4))
print(f"  objective:   {obj:.6e}")

# certify against the exhaustive reference: enumerate the bandwidth
# lattice, solve the power exactly at every point, and allow for at most
# one lattice step of slack
step = 5e-3
_, _, obj_grid = grid_offloading(queues, gains, ctx.v, ctx.tau, ctx.w,
                                 ctx.n0, ctx.p_max, ctx.eps_bw,
                                 alpha_step=step)
slack = offloading_grid_slack(queues, gains, ctx.p_max, ctx.w, ctx.tau,
                              ctx.n0, ctx.eps_bw, step)
print(f"  grid reference {obj_grid:.6e}  (lattice slack {slack:.3e})")
print(f"  solver <= grid + slack: {obj <= obj_grid + slack}")

# --- all together -------------------------------------------------------
decision = decide_slot(ctx, queues, gains)
print("\ndecide_slot per-device summary")
print("  dev   Q (bits)   f (GHz)   p (mW)    alpha")
for i in range(3):
    print(f"   {i}    {queues[i]:8.0f}   {decision.freqs[i] / 1e9:6.4f}   "
          f"{decision.tx_powers[i] * 1e3:7.3f}   {decision.bw_fracs[i]:.4f}")
print(f"  slot cost: {slot_objective(ctx, queues, gains, decision):.6e}")
