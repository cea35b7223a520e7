"""Closed-form steady-state results for the driven three-level atom.

Exact results (``rho33_exact``, ``rho33_resonant``, ``rho33_ladder``) hold
without approximation. The far-detuned family (``rho33_far_detuned`` and
everything derived from it) is valid under a weak probe and large
detuning; those functions always compute and emit
:class:`ApproximationWarning` when the validity conditions fail by the
documented margin, so plots beyond strict validity remain possible.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .params import SystemConfig, Topology

EQUAL_RATE_TOL = 1e-12
ZERO_DETUNING_TOL = 1e-12


class ApproximationWarning(UserWarning):
    """An approximate formula was evaluated outside its validity margins."""


class UnsupportedConfigError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


def _warn(msg: str) -> None:
    warnings.warn(msg, ApproximationWarning, stacklevel=3)


def _require_equal_rates(cfg: SystemConfig) -> None:
    c = cfg.coherence
    if abs(c.gamma_13 - c.gamma_23) > EQUAL_RATE_TOL * cfg.atom.gamma_total:
        raise UnsupportedConfigError(
            "closed form requires gamma_13 == gamma_23; use the numerical solver")


def _require_gamma1(cfg: SystemConfig) -> None:
    if cfg.atom.gamma_1 <= 0:
        raise UnsupportedConfigError("far-detuned formulas need gamma_1 > 0")


def _require_delta1(cfg: SystemConfig) -> None:
    if cfg.drive.delta_1 == 0:
        raise PreconditionError("far-detuned formulas need delta_1 != 0")


def _require_resonant(cfg: SystemConfig) -> None:
    d = cfg.drive
    if abs(d.delta_1) > ZERO_DETUNING_TOL or abs(d.delta_2) > ZERO_DETUNING_TOL:
        raise PreconditionError("formula applies at delta_1 = delta_2 = 0 only")


# -- derived quantities ----------------------------------------------------

@dataclass(frozen=True)
class DerivedRates:
    delta: float
    light_shift: float
    scatter_rate: float
    omega_eff: float
    Y: float
    omega_sq: float


def derived_rates(cfg: SystemConfig) -> DerivedRates:
    """Light shift, pump scattering rate and effective Raman Rabi frequency."""
    _require_delta1(cfg)
    d, atom = cfg.drive, cfg.atom
    o1s, o2s = d.omega_1 ** 2, d.omega_2 ** 2
    return DerivedRates(
        delta=d.delta,
        light_shift=o2s / (4.0 * d.delta_1),
        scatter_rate=o2s / (4.0 * d.delta_1 ** 2) * atom.gamma_total,
        omega_eff=d.omega_2 * d.omega_1 / (2.0 * d.delta_1),
        Y=atom.gamma_2 * o1s + atom.gamma_1 * o2s,
        omega_sq=o1s + o2s,
    )


# -- exact -----------------------------------------------------------------

@dataclass(frozen=True)
class DenominatorCoefficients:
    c0: float
    c1: float
    c2: float
    c0_factorized: float


def denominator_coefficients(cfg: SystemConfig) -> DenominatorCoefficients:
    """Coefficients of ``c0 + c1 g + c2 g^2`` in the exact rho33 denominator.

    ``c0_factorized`` is the same polynomial arranged as a sum of squares
    that exposes the dark and bright resonances; it is also the better
    conditioned of the two near the bright resonance.
    """
    _require_equal_rates(cfg)
    d, atom = cfg.drive, cfg.atom
    g1, g2 = atom.gamma_1, atom.gamma_2
    G = cfg.coherence.gamma_13
    d1, d2 = d.delta_1, d.delta_2
    dl = d.delta
    o1s, o2s = d.omega_1 ** 2, d.omega_2 ** 2
    Y = g2 * o1s + g1 * o2s
    osq = o1s + o2s
    cross = 4.0 * dl ** 2 * o1s * o2s * (6.0 * G - (g1 + g2))

    c0 = (osq ** 2 * Y + 16.0 * dl ** 2 * G ** 2 * Y + cross
          + 16.0 * dl ** 2 * (g2 * o1s * d2 ** 2 + g1 * o2s * d1 ** 2)
          - 8.0 * dl * (d1 * g1 * o2s ** 2 - d2 * g2 * o1s ** 2))
    # 16 W D^2 (dl -+ W/4D)^2 written as 16 W (D dl -+ W/4)^2 to stay finite at D = 0;
    # the probe light-shift term enters with +, as the 1 <-> 2, dl -> -dl symmetry requires
    c0f = (16.0 * g1 * o2s * (d1 * dl - o2s / 4.0) ** 2
           + 16.0 * g2 * o1s * (d2 * dl + o1s / 4.0) ** 2
           + 16.0 * dl ** 2 * G ** 2 * Y + cross
           + o1s * o2s * (Y + osq * (g1 + g2)))
    c1 = (2.0 * osq * (4.0 * G * Y + 3.0 * o1s * o2s)
          + 4.0 * o1s * o2s / G * (g1 * d1 ** 2 + g2 * d2 ** 2 + (g1 + g2) * d1 * d2)
          if G > 0 else math.nan)
    c2 = 8.0 * (2.0 * G ** 2 * Y + 3.0 * G * o1s * o2s
                + 2.0 * (d2 ** 2 * g2 * o1s + d1 ** 2 * g1 * o2s))
    return DenominatorCoefficients(c0, c1, c2, c0f)


def rho33_exact(cfg: SystemConfig) -> float:
    """Exact steady-state upper-level population for ``gamma_13 == gamma_23``."""
    coeffs = denominator_coefficients(cfg)
    d = cfg.drive
    g = cfg.gamma
    G = cfg.coherence.gamma_13
    o1s, o2s = d.omega_1 ** 2, d.omega_2 ** 2
    if o1s == 0.0:
        return 0.0
    if G == 0.0 and g > 0.0:
        raise UnsupportedConfigError("closed form needs gamma_13 > 0 when gamma > 0")
    # 2 alpha Gamma = 4 gamma_13
    num = 2.0 * o1s * o2s * (4.0 * G * (d.delta ** 2 + g ** 2) + (o1s + o2s) * g)
    if g == 0.0:
        den = coeffs.c0_factorized
    else:
        den = coeffs.c0_factorized + coeffs.c1 * g + coeffs.c2 * g ** 2
    if not den > 0.0:
        raise ZeroDivisionError("vanishing denominator in exact rho33")
    return num / den


def rho33_resonant(cfg: SystemConfig) -> float:
    """Upper-level population with both lasers on resonance."""
    _require_resonant(cfg)
    d, atom = cfg.drive, cfg.atom
    g = cfg.gamma
    o1s, o2s = d.omega_1 ** 2, d.omega_2 ** 2
    Y = atom.gamma_2 * o1s + atom.gamma_1 * o2s
    den = (o1s + o2s) * Y + 2.0 * g * (3.0 * o1s * o2s + 2.0 * cfg.coherence.gamma_13 * Y)
    if den == 0.0:
        if o1s == 0.0:
            return 0.0
        raise ZeroDivisionError("vanishing denominator")
    return 2.0 * g * o1s * o2s / den


def two_level_population(omega: float, gamma_total: float = 1.0,
                         coupling: float = 1.0) -> float:
    """Saturated upper-level population of a resonant two-level atom."""
    rabi = coupling * omega
    if rabi == 0.0:
        return 0.0
    return 1.0 / (2.0 + gamma_total ** 2 / rabi ** 2)


def two_level_profile(omega: float, detuning: float, gamma_total: float = 1.0) -> float:
    """Upper-level population of a two-level atom versus laser detuning."""
    s = omega ** 2 / 4.0
    return s / (detuning ** 2 + gamma_total ** 2 / 4.0 + 2.0 * s)


def rho33_ladder(cfg: SystemConfig) -> float:
    """Intermediate-level population of a resonantly driven ladder atom."""
    if Topology(cfg.topology) is not Topology.LADDER:
        raise PreconditionError("rho33_ladder needs a ladder topology")
    _require_resonant(cfg)
    d, atom, c = cfg.drive, cfg.atom, cfg.coherence
    g1, g2 = atom.gamma_1, atom.gamma_2
    G13, G23, g = c.gamma_13, c.gamma_23, c.gamma_12
    o1s, o2s = d.omega_1 ** 2, d.omega_2 ** 2
    y_t = 2.0 * g2 * o1s + g1 * o2s + 2.0 * g1 * g2 * G23
    num = 2.0 * g * o1s * o2s + o1s * g2 * (o1s + 4.0 * G23 * g)
    den = ((o1s + o2s) * y_t - g2 * o1s * (3.0 * o2s + 2.0 * g1 * (G23 - G13))
           + 2.0 * g * (3.0 * o1s * o2s + 2.0 * G13 * y_t + 4.0 * g2 * (G23 - G13) * o1s))
    if num == 0.0:
        return 0.0
    return num / den


# -- far detuned -------------------------------------------------------------

def far_detuned_conditions(cfg: SystemConfig, margin: float = 10.0) -> bool:
    """Weak-probe and large-detuning conditions with a safety ``margin``."""
    d, atom = cfg.drive, cfg.atom
    a_g = cfg.alpha * atom.gamma_total
    probe_cap = atom.gamma_1 * a_g
    if atom.gamma_2 > 0:
        probe_cap = min(probe_cap, atom.gamma_1 * d.omega_2 ** 2 / atom.gamma_2)
    weak = d.omega_1 ** 2 * margin <= probe_cap
    far = d.delta_1 ** 2 >= margin * max(a_g ** 2, d.delta ** 2)
    return weak and far


def _check_far(cfg: SystemConfig, check: bool, margin: float = 10.0) -> None:
    if check and not far_detuned_conditions(cfg, margin):
        _warn("weak-probe / large-detuning conditions not met")


def rho33_far_detuned(cfg: SystemConfig, check: bool = True) -> float:
    """Weak-probe, large-detuning form of the exact population."""
    _require_gamma1(cfg)
    r = derived_rates(cfg)
    _check_far(cfg, check)
    atom = cfg.atom
    g, a = cfg.gamma, cfg.alpha
    g1, g2, G = atom.gamma_1, atom.gamma_2, atom.gamma_total
    R, oe2, ls, dl = r.scatter_rate, r.omega_eff ** 2, r.light_shift, r.delta
    d1 = cfg.drive.delta_1
    num = oe2 * (a * (dl ** 2 + g ** 2) / (2.0 * ls ** 2) * R + g) / (2.0 * g1)
    den = ((dl - ls) ** 2
           + (dl * G / (2.0 * d1)) ** 2 * (a ** 2 + g2 / g1 * oe2 / R ** 2)
           + oe2 / 4.0 * (g2 / g1 + 2.0)
           + (a + oe2 / R ** 2 * G / (a * g1)) * R * g
           + g ** 2)
    return num / den


def rho33_single_photon_wing(cfg: SystemConfig) -> float:
    """Far-wing limit: single-photon excitation from 1 with 2 as repumper."""
    _require_gamma1(cfg)
    d, atom = cfg.drive, cfg.atom
    return d.omega_1 ** 2 * atom.gamma_total / atom.gamma_1 / (4.0 * d.delta_1 ** 2)


def rho33_zero_linewidth(cfg: SystemConfig, check: bool = True) -> float:
    """Far-detuned population at zero laser linewidth, before simplification."""
    _require_gamma1(cfg)
    _require_delta1(cfg)
    _check_far(cfg, check)
    d, atom = cfg.drive, cfg.atom
    g1, g2, G = atom.gamma_1, atom.gamma_2, atom.gamma_total
    o1s, o2s = d.omega_1 ** 2, d.omega_2 ** 2
    d1, dl = d.delta_1, d.delta
    ls = o2s / (4.0 * d1)
    den = (4.0 * d1 ** 2 * (dl - ls) ** 2 + dl ** 2 * G ** 2
           + 4.0 * dl ** 2 * d1 ** 2 * o1s / o2s * g2 / g1
           + o2s * o1s / 4.0 * (g2 / g1 + 2.0))
    return o1s * dl ** 2 * G / g1 / den


def fano_profile(cfg: SystemConfig, check: bool = True) -> float:
    """Zero-linewidth Fano lineshape: dark zero at 0, bright peak near the light shift."""
    _require_gamma1(cfg)
    r = derived_rates(cfg)
    _check_far(cfg, check)
    if check and cfg.gamma != 0:
        _warn("fano_profile is the zero-linewidth form; gamma is ignored")
    g1, G = cfg.atom.gamma_1, cfg.atom.gamma_total
    R, oe2, ls, dl = r.scatter_rate, r.omega_eff ** 2, r.light_shift, r.delta
    num = oe2 * (dl / ls) ** 2 * R / (4.0 * g1)
    return num / ((dl - ls) ** 2 + R ** 2 / 4.0 + oe2 * G / (2.0 * g1))


def fano_fwhm(cfg: SystemConfig) -> float:
    """Full width at half maximum of the bright peak: scattering plus power broadening."""
    _require_gamma1(cfg)
    r = derived_rates(cfg)
    return math.sqrt(r.scatter_rate ** 2
                     + r.omega_eff ** 2 * 2.0 * cfg.atom.gamma_total / cfg.atom.gamma_1)


def fano_half_max_points(cfg: SystemConfig) -> tuple[float, float]:
    """Two-photon detunings at which the Fano peak falls to half height."""
    f = fano_fwhm(cfg)
    ls = derived_rates(cfg).light_shift
    return (ls + f / 2.0 * (f / ls - 1.0), ls + f / 2.0 * (f / ls + 1.0))


def rho33_bright_dressed(cfg: SystemConfig, check: bool = True) -> float:
    """Near-peak form of the Fano profile (two-level atom coupled to a dressed state)."""
    _require_gamma1(cfg)
    r = derived_rates(cfg)
    _check_far(cfg, check)
    g1, G = cfg.atom.gamma_1, cfg.atom.gamma_total
    R, oe2 = r.scatter_rate, r.omega_eff ** 2
    return (oe2 * R / (4.0 * g1)
            / ((r.delta - r.light_shift) ** 2 + R ** 2 / 4.0 + oe2 * G / (2.0 * g1)))


def rho33_far_detuned_simplified(cfg: SystemConfig, check: bool = True) -> float:
    """Finite-linewidth far-detuned form with delta^2 -> light_shift^2 in the denominator."""
    _require_gamma1(cfg)
    r = derived_rates(cfg)
    _check_far(cfg, check)
    g, a = cfg.gamma, cfg.alpha
    g1, G = cfg.atom.gamma_1, cfg.atom.gamma_total
    R, oe2, ls, dl = r.scatter_rate, r.omega_eff ** 2, r.light_shift, r.delta
    num = oe2 * (a * (dl ** 2 + g ** 2) / (2.0 * ls ** 2) * R + g) / (2.0 * g1)
    den = ((dl - ls) ** 2 + (a * R / 2.0 + g) ** 2
           + oe2 * G / (2.0 * g1) * (1.0 + 2.0 * g / (a * R)))
    return num / den


def rho33_large_detuning_limit(cfg: SystemConfig) -> float:
    """Population when delta_1 greatly exceeds every other frequency."""
    _require_gamma1(cfg)
    r = derived_rates(cfg)
    d = cfg.drive
    g, a = cfg.gamma, cfg.alpha
    g1, G = cfg.atom.gamma_1, cfg.atom.gamma_total
    dl, ls, oe2 = r.delta, r.light_shift, r.omega_eff ** 2
    num = oe2 * (2.0 * a * G * (dl ** 2 + g ** 2) / d.omega_2 ** 2 + g) / (2.0 * g1)
    return num / ((dl - ls) ** 2 + g * d.omega_1 ** 2 / (a * g1) + g ** 2)


def _dark_conditions(cfg: SystemConfig, margin: float = 10.0) -> bool:
    return (far_detuned_conditions(cfg, margin)
            and cfg.gamma * margin <= cfg.drive.omega_2 ** 2 / cfg.atom.gamma_total)


def rho33_dark(cfg: SystemConfig, check: bool = True) -> float:
    """Residual population at the dark resonance caused by ground-coherence decay.

    Evaluated at delta = 0 regardless of ``cfg.drive.delta``.
    """
    _require_gamma1(cfg)
    r = derived_rates(cfg)
    if check and not _dark_conditions(cfg):
        _warn("dark-resonance approximation outside validity margins")
    g, a, g1 = cfg.gamma, cfg.alpha, cfg.atom.gamma_1
    o1s = cfg.drive.omega_1 ** 2
    return (r.omega_eff ** 2 * g / (2.0 * g1)
            / (r.light_shift ** 2 + o1s * g / (a * g1) + g ** 2))


def rho33_dark_rates(cfg: SystemConfig) -> float:
    """``rho33_dark`` rewritten in terms of R and the effective Rabi frequency."""
    _require_gamma1(cfg)
    r = derived_rates(cfg)
    g, a = cfg.gamma, cfg.alpha
    g1, G = cfg.atom.gamma_1, cfg.atom.gamma_total
    R, oe2 = r.scatter_rate, r.omega_eff ** 2
    o1s, o2s = cfg.drive.omega_1 ** 2, cfg.drive.omega_2 ** 2
    return (2.0 * o1s * g / g1
            / (o2s + oe2 / R ** 2 * (4.0 * G ** 2 / (a * g1)) * g + 4.0 * G / R * g ** 2))


def rho33_bright(cfg: SystemConfig, check: bool = True) -> float:
    """Population at the bright resonance (delta = light shift) with finite linewidth."""
    _require_gamma1(cfg)
    r = derived_rates(cfg)
    if check and not _dark_conditions(cfg):
        _warn("bright-resonance approximation outside validity margins")
    g, a = cfg.gamma, cfg.alpha
    g1, G = cfg.atom.gamma_1, cfg.atom.gamma_total
    R, oe2 = r.scatter_rate, r.omega_eff ** 2
    width = a * R / 2.0 + g
    return (oe2 / (2.0 * g1) * width
            / (width ** 2 + 0.5 * oe2 * G / g1 * (1.0 + 2.0 * g / (a * R))))


def rho33_bright_zeno(cfg: SystemConfig, check: bool = True) -> float:
    """Bright-resonance population in the Zeno regime (no power broadening)."""
    _require_gamma1(cfg)
    r = derived_rates(cfg)
    if check and r.omega_eff ** 2 > 0.01 * r.scatter_rate ** 2:
        _warn("Zeno-limit bright form used outside the Zeno regime")
    return (r.omega_eff ** 2 / (2.0 * cfg.atom.gamma_1)
            / (cfg.alpha * r.scatter_rate / 2.0 + cfg.gamma))


def absorption_minimum_offset(cfg: SystemConfig) -> float:
    """Displacement of the absorption minimum from delta = 0 at finite linewidth."""
    g = cfg.gamma
    if g == 0.0:
        return 0.0
    return 2.0 * g * cfg.drive.delta_1 / (cfg.alpha * cfg.atom.gamma_total + 4.0 * g)
