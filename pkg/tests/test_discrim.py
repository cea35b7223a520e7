import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eitsim import analytic as an
from eitsim import discrim as dc
from eitsim.params import ConfigError, make_config
from eitsim.scan import Axis


def two_lambda(omega_2=1.0, delta_2=1.0, gamma=1e-3, Z=0.2, omega_1=1e-3):
    cfg = make_config(omega_1, omega_2, delta_2, delta_2, gamma=gamma)
    return dc.DiscriminationScenario(dc.ScenarioKind.TWO_LAMBDA, cfg, Z)


def test_benchmark_values():
    assert dc.benchmark_single_photon_r(0.2, 0.002) == pytest.approx(40001.0)
    assert dc.benchmark_single_photon_r(0.3, 0.3) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        dc.benchmark_single_photon_r(0.2, 0.0)


@pytest.mark.parametrize("bad", [dict(Z=-1.0), dict(C=0.0), dict(C2=math.nan)])
def test_scenario_validation(bad):
    with pytest.raises(ConfigError):
        dc.DiscriminationScenario("two-lambda", make_config(1.0, 1.0), **bad)


@given(st.floats(0.01, 3.0), st.floats(0.1, 5.0), st.floats(1e-3, 0.2), st.floats(0.5, 2.0))
def test_resonant_ratio_from_populations(o1, o2, g, C):
    cfg = make_config(o1, o2, gamma=g)
    bright = an.two_level_population(o1, coupling=C)
    assert dc.ratio_resonant(cfg, C) == pytest.approx(bright / an.rho33_exact(cfg), rel=1e-10)


def test_resonant_ratio_needs_resonance():
    with pytest.raises(ValueError):
        dc.ratio_resonant(make_config(1.0, 1.0, 0.1, 0.0, gamma=0.1))


def test_resonant_limits():
    weak = make_config(1e-3, 1.0, gamma=1e-3)
    assert dc.ratio_resonant_weak_probe(weak) == pytest.approx(dc.ratio_resonant(weak), rel=1e-2)
    strong = make_config(20.0, 1000.0, gamma=1e-3)
    assert dc.ratio_resonant_saturated_probe(strong) == pytest.approx(dc.ratio_resonant(strong),
                                                                     rel=2e-2)
    with pytest.warns(an.ApproximationWarning):
        dc.ratio_resonant_weak_probe(make_config(1.0, 1.0, gamma=1e-3))


def test_closed_form_value():
    # alpha = 1 + gamma for equal laser linewidths
    sc = two_lambda(gamma=1e-3)
    expected = (0.04 + 1e-6) / ((2 * 1.001 * 0.04 + 1e-3) * 1e-3)
    assert dc.r_eit(sc) == pytest.approx(expected)
    assert dc.r_infinity(sc) == dc.r_eit(sc)
    assert expected == pytest.approx(493.35, rel=1e-4)


@given(st.floats(0.3, 10.0), st.floats(1e-4, 1e-2), st.floats(0.05, 0.5))
def test_rate_form_equals_closed_form_at_matched_light_shift(o2, g, Z):
    d1 = o2 ** 2 / (4 * Z)
    cfg = make_config(1e-3, o2, d1, d1, gamma=g)
    sc = dc.DiscriminationScenario("two-lambda", cfg, Z)
    assert dc.r_eit_rates(sc) == pytest.approx(dc.r_eit(sc), rel=1e-12)


def test_closed_form_small_pump_slope():
    r = [dc.r_infinity(two_lambda(omega_2=o)) for o in (1e-3, 2e-3)]
    assert math.log(r[1] / r[0]) / math.log(2) == pytest.approx(2.0, abs=0.05)


@pytest.mark.parametrize("o2, d2, tol", [(0.5, 1e3, 0.02), (1.0, 1e3, 0.02),
                                         (10.0, 1e3, 0.25), (4.0, 100.0, 0.25)])
def test_exact_ratio_tracks_closed_form(o2, d2, tol):
    sc = two_lambda(omega_2=o2, delta_2=d2)
    delta, _ = dc.tracked_delta(sc.cfg, "peak")
    assert dc.ratio_two_lambda(sc, delta) == pytest.approx(dc.r_infinity(sc), rel=tol)


def test_ridge_falls_with_linewidth():
    tops = []
    for g in (1e-4, 1e-3, 1e-2):
        sc = two_lambda(omega_2=4.0, delta_2=1e3, gamma=g)
        tops.append(dc.ratio_two_lambda(sc, dc.tracked_delta(sc.cfg, "peak")[0]))
    assert tops[0] > tops[1] > tops[2]


def test_optimal_settings():
    s = dc.optimal_settings(0.2, 0.0, 1.0)
    assert s.delta_2 == pytest.approx(1.05)
    assert s.omega_1_bound == pytest.approx(0.1 * 0.2)
    s = dc.optimal_settings(0.2, 1e-3, 1.0)
    assert s.delta_2 == pytest.approx(1.25 * (1 + 1e-3 / 0.08) - 0.2)
    with pytest.raises(ValueError):
        dc.optimal_settings(0.0, 1e-3, 1.0)


def test_optimal_detuning_maximises_ratio():
    Z, g = 0.2, 1e-3
    s = dc.optimal_settings(Z, g, 1.0)

    def r(d2):
        sc = two_lambda(omega_2=1.0, delta_2=d2, gamma=g)
        return dc.ratio_two_lambda(sc, dc.tracked_delta(sc.cfg, "peak")[0])
    grid = np.linspace(0.5 * s.delta_2, 2 * s.delta_2, 61)
    best = max(r(d) for d in grid)
    assert r(s.delta_2) == pytest.approx(best, rel=0.05)


@pytest.mark.parametrize("C1, C2, o2, d1, g", [
    (1.0, 1.2, 1.0, 20.0, 1e-3),
    (1.0, 1.5, 1.0, 20.0, 1e-3),
    (1.3, 1.2, 2.0, 50.0, 1e-2),
])
def test_degenerate_ratio_against_full_populations(C1, C2, o2, d1, g):
    D = make_config(1e-3, o2, d1, d1, gamma=g)
    B = dc.degenerate_bright_config(D, C1, C2)
    peak = dc.bright_peak_detuning(B)
    at_b = D.with_drive(delta_1=B.drive.delta_2 + peak.delta)
    numeric = peak.rho33 / an.rho33_exact(at_b)
    assert dc.ratio_degenerate(D, C1, C2) == pytest.approx(numeric, rel=0.03)


def test_degenerate_limits():
    cfg = make_config(1e-3, 1.0, 20.0, 20.0, gamma=1e-3)
    assert dc.ratio_degenerate_limit(cfg, 1.0) == pytest.approx(1.0)
    assert dc.ratio_degenerate_limit(make_config(1e-3, 1.0, 20.0, 20.0), 1.2) == math.inf
    # pump scattering negligible against gamma
    slow = make_config(1e-4, 1.0, 1e4, 1e4, gamma=1e-3)
    assert dc.ratio_degenerate(slow, 1.0, 1.5) == pytest.approx(
        dc.ratio_degenerate_limit(slow, 1.5), rel=0.05)


def test_degenerate_bright_config():
    D = make_config(1e-3, 1.0, 20.0, 20.0, gamma=1e-3)
    B = dc.degenerate_bright_config(D, 2.0, 1.5)
    assert B.atom.gamma_1 == pytest.approx(2.0)
    assert B.atom.gamma_total == pytest.approx(2.5)
    assert B.drive.omega_1 == pytest.approx(2e-3) and B.drive.omega_2 == pytest.approx(1.5)
    assert B.coherence.gamma_12 == D.coherence.gamma_12


@given(st.floats(0.3, 30.0), st.floats(0.5, 1e3))
def test_peak_tracking_finds_a_local_maximum(o2, d2):
    cfg = make_config(1e-3, o2, d2, d2, gamma=1e-3)
    p = dc.bright_peak_detuning(cfg)
    if not p.ok:
        return
    w = dc._peak_width(cfg)

    def rho(x):
        return an.rho33_exact(cfg.with_drive(delta_1=d2 + x))
    assert p.rho33 == pytest.approx(rho(p.delta), rel=1e-12)
    for dx in (-0.05 * w, 0.05 * w):
        assert rho(p.delta + dx) <= p.rho33 * (1 + 1e-9)


def test_tracking_modes():
    cfg = make_config(1e-3, 1.0, 100.0, 100.0, gamma=1e-3)
    ls = an.derived_rates(cfg).light_shift
    peak, _ = dc.tracked_delta(cfg, "peak")
    dressed, _ = dc.tracked_delta(cfg, "light-shift")
    assert peak == pytest.approx(ls, rel=1e-2)
    assert dressed == pytest.approx(ls, rel=1e-2)
    assert dc.tracked_delta(cfg, "none") == (0.0, True)


def test_scan_surface_small_grid():
    sc = two_lambda()
    axes = (Axis.logarithmic("delta_2", 1.0, 100.0, 4), Axis.logarithmic("omega_2", 0.5, 5.0, 3))
    scan = dc.scan_surface(sc, *axes)
    assert scan.values.shape == (4, 3) and scan.valid.all()
    assert scan.quantity == "r"
    assert {"Z", "tracking", "config", "unresolved_peaks"} <= set(scan.metadata)
    d2, o2 = axes[0].values[1], axes[1].values[2]
    point = two_lambda(omega_2=o2, delta_2=d2)
    expected = dc.ratio_two_lambda(point, dc.tracked_delta(point.cfg, "peak")[0])
    assert scan.values[1, 2] == pytest.approx(expected, rel=1e-12)
    assert scan.to_csv() == dc.scan_surface(sc, *axes, threads=2).to_csv()


def test_scan_surface_rejects_unknown_axis():
    with pytest.raises(ValueError):
        dc.scan_surface(two_lambda(), Axis.linear("nu", 0, 1, 2), Axis.linear("Z", 0.1, 1, 2))
