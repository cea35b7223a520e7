import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from eitsim.obe import (DensityMatrix3, IntegrationError, SteadyStateError, build_liouvillian,
                        evolve, from_real_vector, rk4_propagator, steady_state,
                        steady_state_rho33, to_real_vector)
from eitsim.params import AtomParams, LaserDrive, SystemConfig, derive_coherence_rates, make_config

rabi = st.floats(0.05, 5.0)
detuning = st.floats(-5.0, 5.0)
lw = st.floats(0.0, 0.5)
branch = st.floats(0.05, 0.95)


@given(rabi, rabi, detuning, detuning, lw, branch)
def test_steady_state_matches_jump_operator_model(o1, o2, d1, d2, g, g1):
    cfg = make_config(o1, o2, d1, d2, gamma=g, gamma_1=g1, gamma_2=1 - g1)
    rho = steady_state(build_liouvillian(cfg)).rho
    h, jumps = oracles.lambda_operators(o1, o2, d1, d2, g1, 1 - g1, g, g)
    ref = oracles.steady_state(h, jumps)
    assert np.max(np.abs(rho - ref)) < 1e-9


@given(rabi, rabi, detuning, detuning, lw, st.floats(0.05, 2.0))
def test_ladder_steady_state_matches_jump_operator_model(o1, o2, d1, d2, g, g2):
    cfg = make_config(o1, o2, d1, d2, gamma=g, gamma_1=1.0, gamma_2=g2, topology="ladder")
    rho = steady_state(build_liouvillian(cfg)).rho
    h, jumps = oracles.lambda_operators(o1, o2, d1, d2, 1.0, g2, g, g, ladder=True)
    assert np.max(np.abs(rho - oracles.steady_state(h, jumps))) < 1e-9


def _random_hermitian(rng):
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    return a + a.conj().T


@given(rabi, rabi, detuning, detuning, lw, st.integers(0, 2 ** 31))
def test_real_and_complex_forms_agree(o1, o2, d1, d2, g, seed):
    L = build_liouvillian(make_config(o1, o2, d1, d2, gamma=g))
    x = _random_hermitian(np.random.default_rng(seed))
    via_complex = to_real_vector((L.superoperator @ x.reshape(9)).reshape(3, 3))
    assert np.allclose(via_complex, L.matrix @ to_real_vector(x), atol=1e-12)


@given(st.integers(0, 2 ** 31))
def test_real_vector_round_trip(seed):
    x = _random_hermitian(np.random.default_rng(seed))
    assert np.allclose(from_real_vector(to_real_vector(x)), x, atol=1e-14)


@given(rabi, rabi, detuning, detuning, lw, branch)
def test_steady_state_is_a_density_matrix(o1, o2, d1, d2, g, g1):
    L = build_liouvillian(make_config(o1, o2, d1, d2, gamma=g, gamma_1=g1, gamma_2=1 - g1))
    assert L.trace_preserving
    state = steady_state(L)
    assert state.violations() == []
    assert np.max(np.abs(L.apply(state.rho))) < 1e-12


def test_trace_row_vanishes():
    L = build_liouvillian(make_config(0.3, 1.2, 0.4, -0.7, gamma=0.1))
    assert np.allclose(L.matrix[:3].sum(axis=0), 0.0, atol=1e-14)


def test_open_system_refused():
    atom = AtomParams(1.0, 0.3, 0.3, closed=False)
    drive = LaserDrive(1.0, 1.0)
    L = build_liouvillian(SystemConfig(atom, drive, derive_coherence_rates(atom, drive)))
    assert not L.trace_preserving
    with pytest.raises(SteadyStateError, match="open system"):
        steady_state(L)


def test_decoupled_level_refused():
    cfg = make_config(0.5, 0.0, gamma_1=1.0, gamma_2=0.0)
    with pytest.raises(SteadyStateError, match="non-unique"):
        steady_state(build_liouvillian(cfg))


def test_evolve_matches_matrix_exponential():
    o1, o2, d1, d2, g = 0.7, 1.3, 0.4, -0.2, 0.05
    L = build_liouvillian(make_config(o1, o2, d1, d2, gamma=g))
    rho0 = DensityMatrix3.diagonal(1, 0, 0)
    out = evolve(L, rho0, 3.7)
    h, jumps = oracles.lambda_operators(o1, o2, d1, d2, 0.5, 0.5, g, g)
    ref = oracles.propagate(h, jumps, rho0.rho, 3.7)
    assert np.max(np.abs(out.rho - ref)) < 1e-7


def test_evolve_preserves_state_properties():
    L = build_liouvillian(make_config(2.0, 3.0, 1.0, 1.5, gamma=0.1))
    out = evolve(L, np.diag([0.2, 0.5, 0.3]), 10.0)
    assert out.violations() == []


def test_evolve_argument_checks():
    L = build_liouvillian(make_config(1.0, 1.0))
    rho0 = DensityMatrix3.diagonal(1, 0, 0)
    with pytest.raises(ValueError, match="stability"):
        evolve(L, rho0, 1.0, dt=1.0)
    with pytest.raises(ValueError):
        evolve(L, rho0, -1.0)
    assert np.allclose(evolve(L, rho0, 0.0).rho, rho0.rho)


def test_rk4_propagator_is_fourth_order():
    L = build_liouvillian(make_config(1.0, 1.0, 0.5, 0.0, gamma=0.1))
    from scipy.linalg import expm
    errs = [np.max(np.abs(rk4_propagator(L, dt) - expm(L.matrix * dt))) for dt in (0.02, 0.01)]
    assert errs[0] / errs[1] == pytest.approx(32, rel=0.1)


def test_diverging_integration_detected(monkeypatch):
    import eitsim.obe as obe
    L = build_liouvillian(make_config(1.0, 1.0))
    monkeypatch.setattr(obe, "rk4_propagator", lambda L, dt: np.full((9, 9), np.nan))
    with pytest.raises(IntegrationError):
        obe.evolve(L, DensityMatrix3.diagonal(1, 0, 0), 1.0)


def test_two_level_limit():
    # a far-detuned pump leaves a driven two-level transition with repumping
    cfg = make_config(0.4, 0.0, gamma_1=1.0, gamma_2=0.0)
    rho = evolve(build_liouvillian(cfg), DensityMatrix3.diagonal(1, 0, 0), 60.0)
    s = 0.4 ** 2 / 4
    assert rho.rho[2, 2].real == pytest.approx(s / (0.25 + 2 * s), rel=1e-9)


def test_density_matrix_checks():
    with pytest.raises(ValueError):
        DensityMatrix3(np.eye(2))
    bad = DensityMatrix3(np.diag([1.5, -0.5, 0.0]))
    assert "negative eigenvalue" in bad.violations()
    assert "trace differs from 1" in DensityMatrix3(np.eye(3)).violations()


def test_steady_state_rho33_shortcut():
    cfg = make_config(0.3, 1.0, 0.2, 0.0, gamma=0.01)
    assert steady_state_rho33(cfg) == pytest.approx(oracles.rho33(0.3, 1.0, 0.2, 0.0,
                                                                   linewidth=0.01), rel=1e-9)
