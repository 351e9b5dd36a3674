"""Domain types, unit conversion, and the physical rate/power primitives.

Everything downstream of config parsing works in SI units (W, Hz, s, bits).
Human-facing config files use the conventional units of the wireless
literature (dBm/Hz, dB, MHz, ms, kbits); they are converted exactly once,
here, at parse time.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Sequence

import numpy as np

__all__ = [
    "ConfigError",
    "config_hash",
    "SystemConfig",
    "DeviceConfig",
    "DeviceState",
    "SlotDecision",
    "SlotRecord",
    "ParsedConfig",
    "parse_config",
    "emit_config",
    "dbm_per_hz_to_w_per_hz",
    "w_per_hz_to_dbm_per_hz",
    "db_to_linear",
    "linear_to_db",
    "pathloss",
    "local_departure",
    "local_power",
    "remote_departure",
]

_LN2 = math.log(2.0)


class ConfigError(ValueError):
    """Configuration document is missing a key or violates an invariant.

    `field` names the offending key so callers can point users at it.
    """

    def __init__(self, field_name: str, message: str):
        super().__init__(f"config field '{field_name}': {message}")
        self.field = field_name


# ---------------------------------------------------------------------------
# unit conversions
# ---------------------------------------------------------------------------

def dbm_per_hz_to_w_per_hz(x_dbm: float) -> float:
    """dBm/Hz -> W/Hz.  e.g. -174 dBm/Hz -> 3.981e-21 W/Hz."""
    return 10.0 ** (x_dbm / 10.0) / 1000.0


def w_per_hz_to_dbm_per_hz(x_w: float) -> float:
    return 10.0 * math.log10(x_w * 1000.0)


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SystemConfig:
    """System-wide physical and algorithmic parameters, in SI units."""

    num_devices: int            # N
    slot_len: float             # tau, seconds
    bandwidth: float            # w, Hz
    noise_psd: float            # N0, W/Hz
    pathloss_const: float       # g0, linear
    ref_dist: float             # d0, m
    pathloss_exp: float         # theta
    switched_cap: float         # kappa, W*s^3
    control_v: float            # V, bits^2/W
    eps_bw: float               # minimum bandwidth fraction per device
    horizon: int                # T, slots
    rng_seed: int
    burn_in: int = 0            # slots excluded from time averages

    def __post_init__(self):
        if self.num_devices < 1:
            raise ConfigError("num_devices", f"must be >= 1, got {self.num_devices}")
        for name, value in [
            ("tau_ms", self.slot_len),
            ("w_MHz", self.bandwidth),
            ("N0_dBm_per_Hz", self.noise_psd),
            ("g0_dB", self.pathloss_const),
            ("d0_m", self.ref_dist),
            ("theta", self.pathloss_exp),
            ("kappa", self.switched_cap),
            ("V_bits2_per_W", self.control_v),
        ]:
            if not value > 0:
                raise ConfigError(name, f"must be positive, got {value}")
        if not 0 < self.eps_bw < 1.0 / self.num_devices:
            raise ConfigError(
                "eps_A",
                f"must satisfy 0 < eps_A < 1/N = {1.0 / self.num_devices:.6g}, "
                f"got {self.eps_bw}",
            )
        if self.horizon < 1:
            raise ConfigError("horizon_slots", f"must be >= 1, got {self.horizon}")
        if not 0 <= self.burn_in < self.horizon:
            raise ConfigError(
                "burn_in_slots",
                f"must be in [0, horizon), got {self.burn_in}",
            )

    def with_control_v(self, v: float) -> "SystemConfig":
        return replace(self, control_v=v)

    def with_seed(self, seed: int) -> "SystemConfig":
        return replace(self, rng_seed=seed)


@dataclass(frozen=True)
class DeviceConfig:
    """Per-device constants, in SI units."""

    distance: float         # d_i, m
    cycles_per_bit: float   # L_i
    f_max: float            # Hz
    p_max: float            # W
    arrival_max: float      # A_max, bits per slot
    fading_mean: float      # mean small-scale power gain

    def __post_init__(self):
        for name, value in [
            ("distance_m", self.distance),
            ("cycles_per_bit", self.cycles_per_bit),
            ("f_max_GHz", self.f_max),
            ("p_max_mW", self.p_max),
            ("A_max_kbits", self.arrival_max),
            ("fading_mean", self.fading_mean),
        ]:
            if not value > 0:
                raise ConfigError(name, f"must be positive, got {value}")

    @property
    def mean_arrival(self) -> float:
        """Mean arrival rate in bits/slot under the uniform [0, A_max] model."""
        return self.arrival_max / 2.0


@dataclass
class DeviceState:
    """Observable per-device state at the start of a slot."""

    queue: float         # bits, >= 0
    channel_gain: float  # linear power gain, > 0
    arrival: float       # bits arriving this slot (serviceable next slot)


@dataclass(frozen=True)
class SlotDecision:
    """One slot's control action for all devices."""

    freqs: np.ndarray      # Hz, 0 <= f_i <= f_max
    tx_powers: np.ndarray  # W, 0 <= p_i <= p_max
    bw_fracs: np.ndarray   # eps_bw <= alpha_i, sum <= 1
    converged: bool = True


@dataclass(frozen=True)
class SlotRecord:
    """Per-slot telemetry used for metrics and trace files."""

    slot: int
    queues: np.ndarray          # bits, before the queue update
    arrivals: np.ndarray        # bits
    gains: np.ndarray           # linear
    decision: SlotDecision
    local_bits: np.ndarray      # D_l per device
    remote_bits: np.ndarray     # D_r per device
    total_power: float          # W, sum of tx + local CPU power

    @property
    def departures(self) -> np.ndarray:
        return self.local_bits + self.remote_bits


@dataclass(frozen=True)
class ParsedConfig:
    """Parse result: SI-unit configs plus the normalized human-unit document.

    `raw` round-trips exactly: re-parsing it yields bit-identical SI values,
    which keeps config hashes stable across echo/re-run cycles.
    """

    system: SystemConfig
    devices: tuple[DeviceConfig, ...]
    raw: dict = field(repr=False)


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

_SYSTEM_KEYS = (
    "num_devices", "tau_ms", "w_MHz", "N0_dBm_per_Hz", "g0_dB", "d0_m",
    "theta", "kappa", "V_bits2_per_W", "eps_A", "horizon_slots", "seed",
)
_DEVICE_KEYS = (
    "distance_m", "cycles_per_bit", "f_max_GHz", "p_max_mW", "A_max_kbits",
    "fading_mean",
)


def _require(block: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in block:
        raise ConfigError(key, f"missing from '{where}' block")
    return block[key]


def _as_number(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    return float(value)


def _parse_device(block: Mapping[str, Any], index: int) -> DeviceConfig:
    where = f"devices[{index}]"
    vals = {k: _as_number(k, _require(block, k, where)) for k in _DEVICE_KEYS}
    unknown = set(block) - set(_DEVICE_KEYS)
    if unknown:
        raise ConfigError(sorted(unknown)[0], f"unknown key in '{where}' block")
    return DeviceConfig(
        distance=vals["distance_m"],
        cycles_per_bit=vals["cycles_per_bit"],
        f_max=vals["f_max_GHz"] * 1e9,
        p_max=vals["p_max_mW"] * 1e-3,
        arrival_max=vals["A_max_kbits"] * 1e3,
        fading_mean=vals["fading_mean"],
    )


def parse_config(raw: Mapping[str, Any]) -> ParsedConfig:
    """Validate a human-unit config document and convert it to SI.

    The document has a `system` block and a `devices` entry, which is either
    a single mapping (applied to every device) or a list of `num_devices`
    mappings.  Raises ConfigError naming the offending field.
    """
    if not isinstance(raw, Mapping):
        raise ConfigError("<root>", "config document must be a mapping")
    system_block = _require(raw, "system", "<root>")
    if not isinstance(system_block, Mapping):
        raise ConfigError("system", "must be a mapping")

    sys_vals: dict[str, Any] = {}
    for key in _SYSTEM_KEYS:
        sys_vals[key] = _require(system_block, key, "system")
    burn_in = system_block.get("burn_in_slots", 0)

    unknown = set(system_block) - set(_SYSTEM_KEYS) - {"burn_in_slots"}
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key in 'system' block")

    n = sys_vals["num_devices"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise ConfigError("num_devices", f"expected an integer, got {n!r}")
    seed = sys_vals["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed", f"expected a non-negative integer, got {seed!r}")
    horizon = sys_vals["horizon_slots"]
    if isinstance(horizon, bool) or not isinstance(horizon, int):
        raise ConfigError("horizon_slots", f"expected an integer, got {horizon!r}")
    if isinstance(burn_in, bool) or not isinstance(burn_in, int):
        raise ConfigError("burn_in_slots", f"expected an integer, got {burn_in!r}")

    system = SystemConfig(
        num_devices=n,
        slot_len=_as_number("tau_ms", sys_vals["tau_ms"]) * 1e-3,
        bandwidth=_as_number("w_MHz", sys_vals["w_MHz"]) * 1e6,
        noise_psd=dbm_per_hz_to_w_per_hz(
            _as_number("N0_dBm_per_Hz", sys_vals["N0_dBm_per_Hz"])),
        pathloss_const=db_to_linear(_as_number("g0_dB", sys_vals["g0_dB"])),
        ref_dist=_as_number("d0_m", sys_vals["d0_m"]),
        pathloss_exp=_as_number("theta", sys_vals["theta"]),
        switched_cap=_as_number("kappa", sys_vals["kappa"]),
        control_v=_as_number("V_bits2_per_W", sys_vals["V_bits2_per_W"]),
        eps_bw=_as_number("eps_A", sys_vals["eps_A"]),
        horizon=horizon,
        rng_seed=seed,
        burn_in=burn_in,
    )

    dev_block = _require(raw, "devices", "<root>")
    if isinstance(dev_block, Mapping):
        blocks: Sequence[Mapping[str, Any]] = [dev_block] * n
    elif isinstance(dev_block, Sequence):
        if len(dev_block) != n:
            raise ConfigError(
                "devices",
                f"expected {n} device blocks (num_devices), got {len(dev_block)}")
        blocks = dev_block
    else:
        raise ConfigError("devices", "must be a mapping or a list of mappings")
    devices = tuple(_parse_device(b, i) for i, b in enumerate(blocks))

    extra = set(raw) - {"system", "devices"}
    if extra:
        raise ConfigError(sorted(extra)[0], "unknown top-level key")

    normalized = {
        "system": {k: sys_vals[k] for k in _SYSTEM_KEYS}
        | {"burn_in_slots": burn_in},
        "devices": [
            {k: _as_number(k, b[k]) for k in _DEVICE_KEYS} for b in blocks
        ],
    }
    return ParsedConfig(system=system, devices=devices, raw=normalized)


def emit_config(system: SystemConfig, devices: Sequence[DeviceConfig]) -> dict:
    """Inverse of parse_config: SI configs back to a human-unit document.

    dB/dBm fields round-trip through log10, so re-parsing reproduces the SI
    values to ~1e-15 relative (well inside the 1e-9 contract).
    """
    return {
        "system": {
            "num_devices": system.num_devices,
            "tau_ms": system.slot_len * 1e3,
            "w_MHz": system.bandwidth * 1e-6,
            "N0_dBm_per_Hz": w_per_hz_to_dbm_per_hz(system.noise_psd),
            "g0_dB": linear_to_db(system.pathloss_const),
            "d0_m": system.ref_dist,
            "theta": system.pathloss_exp,
            "kappa": system.switched_cap,
            "V_bits2_per_W": system.control_v,
            "eps_A": system.eps_bw,
            "horizon_slots": system.horizon,
            "seed": system.rng_seed,
            "burn_in_slots": system.burn_in,
        },
        "devices": [
            {
                "distance_m": d.distance,
                "cycles_per_bit": d.cycles_per_bit,
                "f_max_GHz": d.f_max * 1e-9,
                "p_max_mW": d.p_max * 1e3,
                "A_max_kbits": d.arrival_max * 1e-3,
                "fading_mean": d.fading_mean,
            }
            for d in devices
        ],
    }


def config_hash(raw: Mapping[str, Any]) -> str:
    """Stable 16-hex-digit digest of a normalized config document.

    Canonical JSON (sorted keys, no whitespace) hashed with sha256; the same
    document always maps to the same digest across runs and platforms.
    """
    canon = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# physical primitives
# ---------------------------------------------------------------------------

def pathloss(system: SystemConfig, distance: float) -> float:
    """Large-scale channel power attenuation g0*(d0/d)^theta."""
    return system.pathloss_const * (system.ref_dist / distance) ** system.pathloss_exp


def local_departure(f, tau: float, cycles_per_bit: float):
    """Bits executed locally in one slot at CPU frequency f: tau*f/L."""
    return tau * f / cycles_per_bit


def local_power(f, kappa: float):
    """CPU power draw at frequency f under the cubic DVFS model: kappa*f^3."""
    return kappa * f ** 3


def remote_departure(alpha, p, h, w: float, tau: float, n0: float):
    """Bits offloaded in one slot: alpha*w*tau*log2(1 + h*p/(alpha*n0*w)).

    Zero bandwidth means zero throughput regardless of power; p = 0 falls out
    of log2(1) = 0 without special-casing.  Accepts scalars or arrays.
    """
    alpha_arr = np.asarray(alpha, dtype=float)
    p_arr = np.asarray(p, dtype=float)
    out = np.zeros(np.broadcast(alpha_arr, p_arr, np.asarray(h)).shape)
    active = alpha_arr > 0.0
    snr = np.divide(np.asarray(h) * p_arr, alpha_arr * n0 * w,
                    out=np.zeros_like(out), where=active)
    np.multiply(alpha_arr * w * tau, np.log2(1.0 + snr), out=out, where=active)
    if out.ndim == 0:
        return float(out)
    return out
