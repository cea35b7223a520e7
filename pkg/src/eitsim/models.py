"""Physical toy models of the bright and dark two-photon resonances.

These are for insight and cross-checking only; nothing in ``discrim`` or
``cooling`` depends on them.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

from .analytic import ApproximationWarning, derived_rates, fano_fwhm, rho33_bright_dressed
from .params import SystemConfig


class Regime(str, enum.Enum):
    ZENO = "zeno"
    POWER_BROADENED = "power-broadened"
    CROSSOVER = "crossover"


@dataclass(frozen=True)
class RegimeReport:
    regime: Regime
    rho33_max: float
    fwhm: float


def pump_scatter_rate(cfg: SystemConfig) -> float:
    """Off-resonant excitation rate out of level 2 by the pump."""
    d = cfg.drive
    return d.omega_2 ** 2 * cfg.atom.gamma_total / (4.0 * d.delta_2 ** 2)


def zeno_rho33(cfg: SystemConfig, raman_detuning: float, check: bool = True) -> float:
    """Rabi-flopping estimate of rho33 interrupted by pump scattering.

    ``raman_detuning`` is measured from the bright resonance. Population
    is assumed to return to level 1 after every scattering event, which is
    the expected behaviour when decay to 1 dominates.
    """
    d = cfg.drive
    if check and not (d.omega_2 >= 10 * d.omega_1
                      and abs(d.delta_2) >= 5 * max(cfg.atom.gamma_total, d.omega_2)):
        warnings.warn("Zeno model used outside its validity margins",
                      ApproximationWarning, stacklevel=2)
    r2 = pump_scatter_rate(cfg)
    oe2 = derived_rates(cfg).omega_eff ** 2
    return oe2 * r2 / (2.0 * cfg.atom.gamma_total) / (raman_detuning ** 2 + r2 ** 2 + oe2)


def gamma_tilde(cfg: SystemConfig) -> float:
    """Dephasing-induced transfer rate between the dark and coupled ground states."""
    o1s, o2s = cfg.drive.omega_1 ** 2, cfg.drive.omega_2 ** 2
    if o1s + o2s == 0:
        return 0.0
    return 2.0 * cfg.gamma * o1s * o2s / (o1s + o2s) ** 2


def rate_model_dark(cfg: SystemConfig) -> float:
    """Three-rate-equation estimate of rho33 at the dark resonance.

    Levels: upper state, dark state ``|->`` and coupled state ``|+>``.
    The upper state is fed from ``|+>`` at the pump scattering rate, decays
    to the dark state at gamma_1, and dephasing couples ``|->`` and ``|+>``
    at :func:`gamma_tilde` in both directions.
    """
    r = derived_rates(cfg).scatter_rate
    gt = gamma_tilde(cfg)
    g1, G = cfg.atom.gamma_1, cfg.atom.gamma_total
    if gt == 0.0:
        return 0.0
    return r * gt / (r * g1 + 2.0 * (r + G) * gt)


def rate_model_dark_simplified(cfg: SystemConfig) -> float:
    """:func:`rate_model_dark` to first order in the dephasing rate."""
    r = derived_rates(cfg)
    g = cfg.gamma
    g1, G = cfg.atom.gamma_1, cfg.atom.gamma_total
    o1s, o2s = cfg.drive.omega_1 ** 2, cfg.drive.omega_2 ** 2
    R, oe2 = r.scatter_rate, r.omega_eff ** 2
    return 2.0 * o1s * g / g1 / (o2s + oe2 / R ** 2 * (4.0 * G ** 2 / g1) * g)


def classify_regime(cfg: SystemConfig, ratio: float = 10.0) -> RegimeReport:
    """Label the bright resonance as Zeno, power-broadened or crossover.

    Deep in either regime the peak and width follow the corresponding
    limiting forms; in the crossover the full near-peak Fano form is used.
    """
    r = derived_rates(cfg)
    R, oe = r.scatter_rate, abs(r.omega_eff)
    g1, G = cfg.atom.gamma_1, cfg.atom.gamma_total
    if R >= ratio * oe:
        return RegimeReport(Regime.ZENO, cfg.drive.omega_1 ** 2 / (g1 * G), R)
    if oe >= ratio * R:
        return RegimeReport(Regime.POWER_BROADENED, R / (2.0 * G),
                            math.sqrt(2.0 * G / g1) * oe)
    at_peak = cfg.with_drive(delta_2=cfg.drive.delta_1 - r.light_shift)
    return RegimeReport(Regime.CROSSOVER, rho33_bright_dressed(at_peak, check=False),
                        fano_fwhm(cfg))
