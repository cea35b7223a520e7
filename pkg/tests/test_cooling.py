import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from eitsim import discrim as dc
from eitsim.cooling import (CoolingParams, CoolingRates, cooling_rates, diffusion_floor,
                            rate_coefficient, scan_cooling, sideband_operator,
                            sideband_probe_detuning, steady_state_thermal)
from eitsim.params import ConfigError, make_config
from eitsim.scan import Axis


def ridge_params(eta1=0.05, eta2=-0.05, omega_2=1.0, delta_2=1.05, nu=0.2):
    """Red sideband of the probe on the bright peak (optimal pump detuning for nu = 0.2)."""
    cfg = make_config(1e-3, omega_2, delta_2, delta_2, gamma=1e-3)
    x, _ = dc.tracked_delta(cfg, "peak")
    return CoolingParams(cfg.with_drive(delta_1=delta_2 + x - nu), nu, eta1, eta2)


def test_sideband_operator_entries():
    v = sideband_operator(make_config(2.0, 3.0), 0.1, 0.2)
    expected = np.zeros((3, 3))
    expected[2, 0], expected[0, 2] = 0.1, -0.1
    expected[2, 1], expected[1, 2] = 0.3, -0.3
    assert np.allclose(v, expected)


@pytest.mark.parametrize("kwargs", [dict(nu=0.0), dict(nu=-1.0), dict(nu=0.2, alpha1=1.5),
                                    dict(nu=0.2, eta1=math.nan)])
def test_parameter_validation(kwargs):
    with pytest.raises(ConfigError):
        CoolingParams(make_config(1.0, 1.0), **kwargs)


def test_lamb_dicke_warning():
    with pytest.warns(UserWarning, match="Lamb-Dicke"):
        CoolingParams(make_config(1.0, 1.0), 0.2, eta1=0.5)


def test_rates_are_sign_swapped_coefficients():
    p = ridge_params()
    r = cooling_rates(p)
    assert r.a_minus == pytest.approx(rate_coefficient(p, p.nu), rel=1e-12)
    assert r.a_plus == pytest.approx(rate_coefficient(p, -p.nu), rel=1e-12)
    assert r.q == pytest.approx(r.a_plus / r.a_minus)
    assert r.n_bar == pytest.approx(r.q / (1 - r.q))


def test_ridge_point_cools_and_needs_opposite_signs():
    # blue-detuned pump, cooling via the bright resonance
    assert cooling_rates(ridge_params()).q < 0.1
    assert cooling_rates(ridge_params(eta2=0.0)).q < 0.1
    assert cooling_rates(ridge_params(eta1=0.0)).q < 0.1
    # equal co-propagating components leave the dark state untouched by the recoil
    assert cooling_rates(ridge_params(eta2=0.05)).q > 1.0


@pytest.mark.parametrize("d2", [30.0, -30.0])
def test_resolved_sideband_sign_convention(d2):
    # far-detuned pump: the probe transition behaves like a two-level line
    red = cooling_rates(CoolingParams(make_config(0.1, 1.0, -5.0, d2), 5.0, 0.05, 0.0))
    blue = cooling_rates(CoolingParams(make_config(0.1, 1.0, 5.0, d2), 5.0, 0.05, 0.0))
    assert red.q < 0.01 and blue.q > 100
    assert blue.heating and not red.heating
    assert blue.n_bar == math.inf


def test_zero_recoil_gives_zero_rates():
    r = cooling_rates(ridge_params(eta1=0.0, eta2=0.0))
    assert r.a_plus == 0.0 and r.a_minus == 0.0 and math.isnan(r.q)


@given(st.floats(0.01, 1.0), st.floats(0.005, 0.05), st.floats(0.005, 0.05))
def test_rates_scale_with_eta_squared(s, e1, e2):
    a = cooling_rates(ridge_params(e1, -e2))
    b = cooling_rates(ridge_params(s * e1, -s * e2))
    assert b.a_minus == pytest.approx(s ** 2 * a.a_minus, rel=1e-9)
    assert b.a_plus == pytest.approx(s ** 2 * a.a_plus, rel=1e-9)
    assert b.q == pytest.approx(a.q, rel=1e-6)


@given(st.floats(0.3, 10.0), st.floats(0.1, 100.0), st.floats(0.05, 2.0))
def test_rates_are_real(o2, d2, nu):
    cfg = make_config(0.05, o2, d2 + 0.1, d2, gamma=1e-3)
    assert cooling_rates(CoolingParams(cfg, nu, 0.05, -0.05)).imag_residue <= 1e-10


def test_far_off_resonant_trap_frequency_leaves_floor():
    lasers = ridge_params().cfg
    p = CoolingParams(lasers, 1e3, 0.05, -0.05)
    r = cooling_rates(p)
    floor = diffusion_floor(p)
    assert floor > 0
    assert r.a_plus == pytest.approx(floor, rel=0.05)
    assert r.a_minus == pytest.approx(floor, rel=0.05)


@pytest.mark.parametrize("q, n_max", [(0.5, 50), (0.0, 5), (0.9, 400), (0.99, 20)])
def test_thermal_state(q, n_max):
    th = steady_state_thermal(q, n_max)
    assert th.probabilities.sum() == pytest.approx(1.0, abs=1e-14)
    assert th.n_bar == pytest.approx(oracles.geometric_mean(q, n_max), rel=1e-12, abs=1e-15)
    assert th.truncation_error == pytest.approx(q ** (n_max + 1))


def test_thermal_mean_half():
    assert abs(steady_state_thermal(0.5, 50).n_bar - 1.0) <= 1e-12


@given(st.floats(0.0, 0.95))
def test_thermal_mean_identity(q):
    assert steady_state_thermal(q, 3000).n_bar == pytest.approx(q / (1 - q), rel=1e-12,
                                                                  abs=1e-15)


def test_thermal_state_rejects_heating():
    with pytest.raises(ValueError):
        steady_state_thermal(CoolingRates(1.0, 0.5, 2.0, math.inf), 10)
    with pytest.raises(ValueError):
        steady_state_thermal(0.5, -1)


def test_sideband_probe_detuning():
    p = ridge_params()
    cfg = p.cfg
    x, _ = dc.tracked_delta(cfg, "peak")
    assert sideband_probe_detuning(p) == pytest.approx(cfg.drive.delta_2 + x - p.nu)


def test_scan_cooling_small_grid():
    template = ridge_params()
    axes = (Axis.logarithmic("delta_2", 1.0, 30.0, 3), Axis.logarithmic("omega_2", 0.5, 3.0, 3))
    scan = scan_cooling(template, *axes)
    assert scan.quantity == "inv_q" and scan.values.shape == (3, 3)
    assert {"nu", "eta1", "eta2", "tracking", "unresolved_peaks"} <= set(scan.metadata)
    point = ridge_params(omega_2=axes[1].values[1], delta_2=axes[0].values[2])
    r = cooling_rates(point)
    assert scan.values[2, 1] == pytest.approx(r.a_minus / r.a_plus, rel=1e-9)
    assert scan.to_csv() == scan_cooling(template, *axes, threads=2).to_csv()


def test_scan_cooling_eta_axis():
    template = ridge_params()
    scan = scan_cooling(template, Axis.linear("eta1", 0.01, 0.05, 2),
                        Axis.linear("delta_2", 1.0, 2.0, 2))
    assert scan.valid.all()
    with pytest.raises(ValueError):
        scan_cooling(template, Axis.linear("Z", 0.1, 0.2, 2), Axis.linear("nu", 0.1, 0.2, 2))
