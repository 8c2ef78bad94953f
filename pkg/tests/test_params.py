import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from magnomech.params import (TWO_PI, ConfigError, ParamWarning, ProbeGrid, SphereSpec,
                              SystemParams, ValidationError, YIG_SPHERE, baseline_params,
                              dump_config, field_from_rabi, load_config, params_from_dict,
                              power_from_amp, probe_amp_from_power, rabi_from_field,
                              serialize, spins_from_sphere, validate)


def test_baseline_detunings_equal_phonon_frequency():
    p = baseline_params()
    assert p.delta_a == pytest.approx(p.omega_b, rel=1e-9)
    assert p.delta_m[0] == pytest.approx(p.omega_b, rel=1e-9)
    assert p.mode == "override"
    assert baseline_params(G_mb_override=None).mode == "self-consistent"


def test_with_detunings_sets_requested_values():
    p = baseline_params().with_detunings(delta_m2=0.7 * TWO_PI * 10e6)
    assert p.delta_m[1] == pytest.approx(0.7 * p.omega_b, rel=1e-9)
    assert p.delta_m[0] == pytest.approx(p.omega_b, rel=1e-9)


def test_shipped_config_matches_baseline():
    from importlib.resources import files
    text = files("magnomech").joinpath("configs/baseline.json").read_text()
    assert load_config(text) == baseline_params()


def test_missing_keys_are_listed():
    with pytest.raises(ConfigError) as err:
        params_from_dict({"omega_a_hz": 1e10})
    assert "kappa_b_hz" in err.value.keys
    assert "Omega_d_rad_s" in err.value.keys
    assert "omega_a_hz" not in err.value.keys


def test_invalid_json_is_config_error():
    with pytest.raises(ConfigError):
        load_config("{not json")


def test_nonpositive_damping_rejected():
    with pytest.raises(ValidationError):
        validate(baseline_params(kappa_a=0.0))
    with pytest.raises(ValidationError):
        validate(baseline_params(kappa_m=(TWO_PI * 1e5, -1.0)))
    doc = dump_config(baseline_params())
    doc["kappa_b_hz"] = 0.0
    with pytest.raises(ValidationError):
        params_from_dict(doc)


def test_rwa_and_blue_detuning_warnings():
    p = baseline_params(g=(TWO_PI * 0.5e9, TWO_PI * 1.5e6))
    assert any("rotating-wave" in w.lower() or "rwa" in w.lower() for w in validate(p))
    blue = baseline_params().with_detunings(delta_m2=-TWO_PI * 10e6)
    assert any("blue" in w for w in validate(blue))
    doc = dump_config(blue)
    with pytest.warns(ParamWarning):
        params_from_dict(doc)


def test_yig_sphere_spin_count():
    # 250 um sphere at 4.22e27 m^-3
    n = spins_from_sphere(YIG_SPHERE)["N"]
    volume = 4.0 / 3.0 * math.pi * (125e-6) ** 3
    assert n == pytest.approx(4.22e27 * volume, rel=1e-12)
    with pytest.raises(ValueError):
        SphereSpec(diameter=-1.0, spin_density=1e27)


def test_field_rabi_inverse():
    for b in (0.0, 1e-9, 3.3e-7):
        assert field_from_rabi(rabi_from_field(b, YIG_SPHERE), YIG_SPHERE) == pytest.approx(b, abs=1e-24)
    with pytest.raises(ValueError):
        rabi_from_field(-1.0, YIG_SPHERE)


def test_probe_power_round_trip():
    amp = probe_amp_from_power(1e-3, TWO_PI * 2.1e6, TWO_PI * 10e9)
    assert power_from_amp(amp, TWO_PI * 2.1e6, TWO_PI * 10e9) == pytest.approx(1e-3, rel=1e-12)
    assert probe_amp_from_power(0.0, 1.0, 1.0) == 0.0


def test_probe_grid():
    g = ProbeGrid(1.0, 2.0, 5)
    assert np.allclose(g.deltas(), [1.0, 1.25, 1.5, 1.75, 2.0])
    with pytest.raises(ValueError):
        ProbeGrid(2.0, 1.0, 5)
    with pytest.raises(ValueError):
        ProbeGrid(1.0, 2.0, 0)


finite_rate = st.floats(min_value=1e-3, max_value=1e11, allow_nan=False, allow_infinity=False)


@given(wa=st.floats(1e9, 2e10), wb=finite_rate, ka=finite_rate, kb=finite_rate,
       k1=finite_rate, k2=finite_rate, g1=st.floats(0, 1e8), g2=st.floats(0, 1e8),
       gmb=st.floats(0, 1e3), wd=st.floats(1e9, 2e10),
       om=st.complex_numbers(max_magnitude=1e13, allow_nan=False, allow_infinity=False),
       override=st.one_of(st.none(), st.floats(0, 1e8)))
def test_config_round_trip_is_exact(wa, wb, ka, kb, k1, k2, g1, g2, gmb, wd, om, override):
    p = SystemParams(omega_a=wa, omega_b=wb, omega_m=(wa, wa * 1.0001), kappa_a=ka, kappa_b=kb,
                     kappa_m=(k1, k2), g=(g1, g2), g_mb=gmb, omega_d=wd, Omega_d=om,
                     G_mb_override=override)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        back = load_config(serialize(p))
    assert back == p
    assert json.loads(serialize(p)) == dump_config(p)


def test_reference_document_loads_without_warnings():
    from importlib.resources import files
    text = files("magnomech").joinpath("configs/baseline.json").read_text()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        p = load_config(text)
    assert p.kappa_a == TWO_PI * 2.1e6
    assert validate(p) == []


def test_empty_document_lists_every_mandatory_key():
    with pytest.raises(ConfigError) as err:
        load_config("")
    assert len(err.value.keys) == 13


def test_rwa_warning_for_large_coupling():
    p = baseline_params()
    assert validate(p.replace(g=(p.omega_a / 10, p.g[1])))


def test_detunings_follow_drive_frequency():
    p = baseline_params()
    q = p.replace(omega_d=p.omega_d + 5.0)
    assert q.delta_a == pytest.approx(p.delta_a - 5.0)
    assert q.delta_m[1] == pytest.approx(p.delta_m[1] - 5.0)


def test_field_calibration_scaling():
    b = field_from_rabi(1.2e12, YIG_SPHERE)
    assert abs(rabi_from_field(b, YIG_SPHERE)) == pytest.approx(1.2e12, rel=1e-12)
    assert rabi_from_field(0.0, YIG_SPHERE) == 0
    assert abs(rabi_from_field(2 * b, YIG_SPHERE)) == pytest.approx(2.4e12, rel=1e-12)
    xs = np.linspace(0, 1e-6, 50)
    assert np.all(np.diff([abs(rabi_from_field(x, YIG_SPHERE)) for x in xs]) >= 0)


def test_probe_amplitude_hand_value():
    hbar = 1.054571817e-34
    kappa, omega = TWO_PI * 2.1e6, TWO_PI * 10e9
    expected = math.sqrt(2 * 1e-15 * kappa / (hbar * omega))
    assert probe_amp_from_power(1e-15, kappa, omega) == pytest.approx(expected, rel=1e-9)
    assert probe_amp_from_power(4e-15, kappa, omega) == pytest.approx(2 * expected, rel=1e-9)


def test_spin_count_scaling_and_quoted_value():
    from magnomech.params import QUOTED_TOTAL_SPIN
    s = spins_from_sphere(YIG_SPHERE)
    assert s["N"] == pytest.approx(3.45e16, rel=0.01)
    assert s["S_total"] == pytest.approx(2.5 * s["N"])
    assert s["S_total"] / QUOTED_TOTAL_SPIN > 100  # the quoted figure is not reproduced
    half = SphereSpec(YIG_SPHERE.diameter / 2, YIG_SPHERE.spin_density)
    assert spins_from_sphere(half)["N"] == pytest.approx(s["N"] / 8, rel=1e-12)
    tiny = SphereSpec(1e-12, YIG_SPHERE.spin_density)
    assert spins_from_sphere(tiny)["N"] < 1e-8
