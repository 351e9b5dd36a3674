"""
Tour of the physical model
==========================

What one slot of the system can move and what it costs: the cubic CPU
power curve, the log-throughput uplink, and the bandwidth marginal rate
that drives every allocation decision downstream.
"""

import numpy as np

from mecsim.model import (
    dbm_per_hz_to_w_per_hz,
    local_departure,
    local_power,
    parse_config,
    pathloss,
    remote_departure,
)
from mecsim.controller import marginal_rate

# the packaged default scenario: 5 devices, 150 m links, 1 ms slots
raw = {
    "system": {"num_devices": 5, "tau_ms": 1.0, "w_MHz": 10.0,
               "N0_dBm_per_Hz": -174.0, "g0_dB": -40.0, "d0_m": 1.0,
               "theta": 4.0, "kappa": 1e-27, "V_bits2_per_W": 1e9,
               "eps_A": 1e-4, "horizon_slots": 5000, "seed": 1},
    "devices": {"distance_m": 150.0, "cycles_per_bit": 737.5,
                "f_max_GHz": 1.0, "p_max_mW": 500.0, "A_max_kbits": 4.0,
                "fading_mean": 1.0},
}
parsed = parse_config(raw)
sys_ = parsed.system
dev = parsed.devices[0]
tau, w, n0 = sys_.slot_len, sys_.bandwidth, sys_.noise_psd

print("noise PSD: -174 dBm/Hz =", dbm_per_hz_to_w_per_hz(-174.0), "W/Hz")

# large-scale attenuation falls off with the fourth power of distance, so
# moving a device from 50 m to 200 m costs 24 dB of link budget
print("\npathloss vs distance")
for d in [50.0, 100.0, 150.0, 200.0]:
    g = pathloss(sys_, d)
    print(f"  {d:6.0f} m   gain {g:.3e}   ({10 * np.log10(g):6.1f} dB)")

# local execution: bits per slot scale linearly with frequency, but power
# scales with its cube, which is why the controller slows CPUs down the
# moment queues allow it
print("\nlocal execution over one slot")
for f_ghz in [0.25, 0.5, 1.0]:
    f = f_ghz * 1e9
    bits = local_departure(f, tau, dev.cycles_per_bit)
    watts = local_power(f, sys_.switched_cap)
    print(f"  {f_ghz:4.2f} GHz   {bits:7.1f} bits   {watts * 1e3:8.2f} mW")

# the uplink: offloaded bits for a 150 m device across transmit powers,
# at a few bandwidth shares
h = pathloss(sys_, 150.0)
print("\noffloaded bits per slot (150 m link, no fading)")
print("  p (mW)    alpha=0.2   alpha=0.5   alpha=1.0")
for p_mw in [10.0, 100.0, 500.0]:
    row = [remote_departure(a, p_mw * 1e-3, h, w, tau, n0)
           for a in (0.2, 0.5, 1.0)]
    print(f"  {p_mw:6.0f}    {row[0]:9.1f}   {row[1]:9.1f}   {row[2]:9.1f}")

# the derivative of those bits with respect to the bandwidth share is what
# the allocator equalizes across devices; it blows up as the share shrinks
# and decays once the share dilutes the power spectral density
print("\nmarginal rate of bandwidth (p = 100 mW)")
alphas = np.array([0.01, 0.05, 0.2, 0.5, 1.0])
mr = marginal_rate(alphas, 0.1, h, w, tau, n0)
for a, m in zip(alphas, mr):
    print(f"  alpha {a:5.2f}   {m:10.1f} bits per unit share")

# sanity: the closed form matches a central finite difference
a0, p0, step = 0.37, 0.1, 1e-7
fd = (remote_departure(a0 + step, p0, h, w, tau, n0)
      - remote_departure(a0 - step, p0, h, w, tau, n0)) / (2 * step)
mr0 = float(marginal_rate(a0, p0, h, w, tau, n0))
print(f"\nclosed form {mr0:.6f} vs finite difference {fd:.6f} "
      f"(relative gap {abs(mr0 - fd) / fd:.2e})")
