"""
What the joint control buys
===========================

The same workload under three policies: the full controller, a cripple
that never offloads, and one that offloads over a frozen equal split of
the band.  Each restriction shrinks the feasible set, and the run
metrics show what that costs.
"""

import copy

import numpy as np

from mecsim.baselines import POLICIES, make_policy
from mecsim.model import parse_config
from mecsim.simulator import Simulator

raw = {
    "system": {"num_devices": 5, "tau_ms": 1.0, "w_MHz": 10.0,
               "N0_dBm_per_Hz": -174.0, "g0_dB": -40.0, "d0_m": 1.0,
               "theta": 4.0, "kappa": 1e-27, "V_bits2_per_W": 1e9,
               "eps_A": 1e-4, "horizon_slots": 5000, "seed": 1},
    "devices": {"distance_m": 150.0, "cycles_per_bit": 737.5,
                "f_max_GHz": 1.0, "p_max_mW": 500.0, "A_max_kbits": 4.0,
                "fading_mean": 1.0},
}

# identical arrivals and channels for all three policies: only the
# decisions differ
results = {}
for name in POLICIES:
    parsed = parse_config(copy.deepcopy(raw))
    policy = make_policy(name, parsed.system, parsed.devices)
    results[name] = Simulator.from_parsed(parsed, policy).run()

print("policy          power (mW)   delay (ms)   final queues (kbits)")
for name in ("local_only", "static_equal", "lyapunov"):
    r = results[name]
    finals = " ".join(f"{q / 1e3:7.1f}" for q in r.final_queue_bits)
    print(f"{name:14s} {r.avg_power_w * 1e3:11.3f} {r.delay_ms:12.3f}"
          f"   {finals}")

# the mean arrival load is 2 kbits per 1 ms slot per device, but a CPU
# pinned at f_max only serves tau*f_max/L = 1.356 kbits: local-only is
# overloaded and its queues grow linearly without bound
r = results["local_only"]
growth = r.final_queue_bits / r.horizon
print(f"\nlocal-only queue growth: {np.round(growth, 1)} bits/slot "
      f"(arrivals 2000, local service cap 1355.9)")

# the static split wastes band on idle devices; the controller reassigns
# it slot by slot, serving the same load with less transmit power
lyap, stat = results["lyapunov"], results["static_equal"]
print(f"\nstatic split power / controller power: "
      f"{stat.avg_power_w / lyap.avg_power_w:.2f}x "
      f"at delays {stat.delay_ms:.2f} ms vs {lyap.delay_ms:.2f} ms")

# stability at a glance: bounded queues keep the final backlog a tiny
# fraction of what arrived over the horizon, divergence does not
print("\nfinal backlog over total arrivals (per policy)")
for name, r in results.items():
    ratio = r.final_queue_bits.sum() / (r.horizon *
                                        r.mean_arrival_bits.sum())
    verdict = "stable" if r.max_final_queue_ratio < 0.05 else "diverging"
    print(f"  {name:14s} {ratio:8.4f}   {verdict}")
