"""Unit conversions, config parsing, and the physical primitives."""

import copy
import math

import numpy as np
import pytest

from conftest import G150_REF, N0_REF, make_raw
from mecsim.model import (
    ConfigError,
    DeviceConfig,
    SystemConfig,
    config_hash,
    db_to_linear,
    dbm_per_hz_to_w_per_hz,
    emit_config,
    linear_to_db,
    local_departure,
    local_power,
    parse_config,
    pathloss,
    remote_departure,
    w_per_hz_to_dbm_per_hz,
)

# frozen with 60-digit decimal arithmetic, independent of the package code
DL_REF = 1355.9322033898304   # tau*f/L at f = 1 GHz, tau = 1 ms, L = 737.5
DR_REF = 3598.90041859346     # alpha=0.2, p=0.1 W, h=G150_REF, w=10 MHz


def _system(**overrides) -> SystemConfig:
    kw = dict(num_devices=5, slot_len=1e-3, bandwidth=1e7, noise_psd=N0_REF,
              pathloss_const=1e-4, ref_dist=1.0, pathloss_exp=4.0,
              switched_cap=1e-27, control_v=1e9, eps_bw=1e-4, horizon=5000,
              rng_seed=1)
    kw.update(overrides)
    return SystemConfig(**kw)


# ---------------------------------------------------------------------------
# unit conversions
# ---------------------------------------------------------------------------

def test_noise_psd_conversion():
    assert dbm_per_hz_to_w_per_hz(-174.0) == pytest.approx(N0_REF, rel=1e-12)


def test_noise_psd_round_trip():
    assert w_per_hz_to_dbm_per_hz(dbm_per_hz_to_w_per_hz(-174.0)) == \
        pytest.approx(-174.0, rel=1e-12)


def test_db_conversions():
    assert db_to_linear(-40.0) == pytest.approx(1e-4, rel=1e-14)
    assert db_to_linear(0.0) == 1.0
    assert linear_to_db(db_to_linear(-37.3)) == pytest.approx(-37.3, rel=1e-12)


# ---------------------------------------------------------------------------
# physical primitives
# ---------------------------------------------------------------------------

def test_pathloss_at_150m():
    assert pathloss(_system(), 150.0) == pytest.approx(G150_REF, rel=1e-12)


def test_pathloss_at_reference_distance():
    assert pathloss(_system(), 1.0) == pytest.approx(1e-4, rel=1e-14)


def test_local_departure_value():
    assert local_departure(1e9, 1e-3, 737.5) == pytest.approx(DL_REF, rel=1e-12)


def test_local_power_value():
    assert local_power(1e9, 1e-27) == pytest.approx(1.0, rel=1e-12)
    assert local_power(0.0, 1e-27) == 0.0


def test_remote_departure_value():
    got = remote_departure(0.2, 0.1, G150_REF, 1e7, 1e-3, N0_REF)
    assert got == pytest.approx(DR_REF, rel=1e-12)


def test_remote_departure_degenerate_inputs():
    # zero bandwidth kills the rate even at full power; zero power likewise
    assert remote_departure(0.0, 0.5, G150_REF, 1e7, 1e-3, N0_REF) == 0.0
    assert remote_departure(0.3, 0.0, G150_REF, 1e7, 1e-3, N0_REF) == 0.0


def test_remote_departure_broadcasts():
    alpha = np.array([0.2, 0.2, 0.0])
    p = np.array([0.1, 0.0, 0.1])
    got = remote_departure(alpha, p, G150_REF, 1e7, 1e-3, N0_REF)
    assert got.shape == (3,)
    assert got[0] == pytest.approx(DR_REF, rel=1e-12)
    assert got[1] == 0.0 and got[2] == 0.0


def test_remote_departure_increasing_in_alpha_and_power():
    grid = np.linspace(0.05, 1.0, 40)
    in_alpha = remote_departure(grid, 0.1, G150_REF, 1e7, 1e-3, N0_REF)
    in_power = remote_departure(0.4, grid, G150_REF, 1e7, 1e-3, N0_REF)
    assert np.all(np.diff(in_alpha) > 0)
    assert np.all(np.diff(in_power) > 0)


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def test_parse_converts_to_si(base_raw):
    parsed = parse_config(base_raw)
    sys_ = parsed.system
    assert sys_.num_devices == 5
    assert sys_.slot_len == pytest.approx(1e-3, rel=1e-15)
    assert sys_.bandwidth == pytest.approx(1e7, rel=1e-15)
    assert sys_.noise_psd == pytest.approx(N0_REF, rel=1e-12)
    assert sys_.pathloss_const == pytest.approx(1e-4, rel=1e-14)
    assert sys_.eps_bw == 1e-4
    assert sys_.burn_in == 0
    assert len(parsed.devices) == 5
    dev = parsed.devices[0]
    assert dev.f_max == pytest.approx(1e9, rel=1e-15)
    assert dev.p_max == pytest.approx(0.5, rel=1e-15)
    assert dev.arrival_max == pytest.approx(4000.0, rel=1e-15)
    assert dev.mean_arrival == pytest.approx(2000.0, rel=1e-15)


def test_parse_accepts_device_list(base_raw):
    base_raw["devices"] = [dict(base_raw["devices"]) for _ in range(5)]
    base_raw["devices"][2]["distance_m"] = 120.0
    parsed = parse_config(base_raw)
    assert parsed.devices[2].distance == 120.0
    assert parsed.devices[0].distance == 150.0


def test_parse_round_trip_is_stable(base_raw):
    first = parse_config(base_raw)
    second = parse_config(emit_config(first.system, first.devices))
    assert second.system.noise_psd == pytest.approx(first.system.noise_psd,
                                                    rel=1e-14)
    assert second.system.pathloss_const == pytest.approx(
        first.system.pathloss_const, rel=1e-14)
    assert second.devices[0].p_max == pytest.approx(first.devices[0].p_max,
                                                    rel=1e-14)
    # normalized documents and digests agree after one more cycle
    third = parse_config(second.raw)
    assert third.raw == second.raw
    assert config_hash(third.raw) == config_hash(second.raw)


@pytest.mark.parametrize("key", [
    "num_devices", "tau_ms", "w_MHz", "N0_dBm_per_Hz", "g0_dB", "d0_m",
    "theta", "kappa", "V_bits2_per_W", "eps_A", "horizon_slots", "seed",
])
def test_parse_missing_system_key(base_raw, key):
    del base_raw["system"][key]
    with pytest.raises(ConfigError, match=key):
        parse_config(base_raw)


def test_parse_missing_device_key(base_raw):
    del base_raw["devices"]["p_max_mW"]
    with pytest.raises(ConfigError, match="p_max_mW"):
        parse_config(base_raw)


def test_parse_rejects_unknown_keys(base_raw):
    bad = copy.deepcopy(base_raw)
    bad["system"]["bogus_knob"] = 1.0
    with pytest.raises(ConfigError, match="bogus_knob"):
        parse_config(bad)
    bad = copy.deepcopy(base_raw)
    bad["devices"]["bogus_knob"] = 1.0
    with pytest.raises(ConfigError, match="bogus_knob"):
        parse_config(bad)
    bad = copy.deepcopy(base_raw)
    bad["extra_block"] = {}
    with pytest.raises(ConfigError, match="extra_block"):
        parse_config(bad)


def test_parse_rejects_bad_scalars(base_raw):
    for key, value in [("num_devices", 2.5), ("num_devices", True),
                       ("seed", -3), ("seed", "one"),
                       ("horizon_slots", "long"), ("tau_ms", "fast")]:
        bad = copy.deepcopy(base_raw)
        bad["system"][key] = value
        with pytest.raises(ConfigError, match=key):
            parse_config(bad)


def test_parse_rejects_wrong_device_count(base_raw):
    base_raw["devices"] = [dict(base_raw["devices"]) for _ in range(3)]
    with pytest.raises(ConfigError, match="devices"):
        parse_config(base_raw)


def test_parse_rejects_non_mapping_blocks(base_raw):
    with pytest.raises(ConfigError, match="<root>"):
        parse_config([1, 2, 3])
    base_raw["devices"] = 7
    with pytest.raises(ConfigError, match="devices"):
        parse_config(base_raw)


def test_system_config_invariants():
    with pytest.raises(ConfigError, match="num_devices"):
        _system(num_devices=0)
    with pytest.raises(ConfigError, match="eps_A"):
        _system(eps_bw=0.25)  # >= 1/N for N = 5
    with pytest.raises(ConfigError, match="eps_A"):
        _system(eps_bw=0.0)
    with pytest.raises(ConfigError, match="V_bits2_per_W"):
        _system(control_v=0.0)
    with pytest.raises(ConfigError, match="horizon_slots"):
        _system(horizon=0)
    with pytest.raises(ConfigError, match="burn_in_slots"):
        _system(horizon=10, burn_in=10)


def test_device_config_invariants():
    with pytest.raises(ConfigError, match="p_max_mW"):
        DeviceConfig(distance=150.0, cycles_per_bit=737.5, f_max=1e9,
                     p_max=0.0, arrival_max=4000.0, fading_mean=1.0)


def test_config_error_names_field(base_raw):
    del base_raw["system"]["kappa"]
    with pytest.raises(ConfigError) as err:
        parse_config(base_raw)
    assert err.value.field == "kappa"


# ---------------------------------------------------------------------------
# config digest
# ---------------------------------------------------------------------------

def test_config_hash_ignores_key_order(base_raw):
    parsed = parse_config(base_raw)
    shuffled = {k: parsed.raw[k] for k in reversed(list(parsed.raw))}
    shuffled["system"] = {k: parsed.raw["system"][k]
                          for k in reversed(list(parsed.raw["system"]))}
    assert config_hash(shuffled) == config_hash(parsed.raw)


def test_config_hash_tracks_values(base_raw):
    a = parse_config(base_raw)
    b = parse_config(make_raw(seed=2))
    assert len(config_hash(a.raw)) == 16
    assert config_hash(a.raw) != config_hash(b.raw)


def test_with_control_v_and_seed(base_raw):
    sys_ = parse_config(base_raw).system
    assert sys_.with_control_v(5e9).control_v == 5e9
    assert sys_.with_seed(9).rng_seed == 9
    assert sys_.with_control_v(5e9).slot_len == sys_.slot_len
