"""Discrimination ratio between an interacting (B) and a suppressed (D) manifold.

Scenarios covered:

* single-photon excitation limited by laser linewidth (benchmark);
* resonant lasers, D at dark resonance, B a two-level atom with Rabi
  frequency ``C * omega_1``;
* two identical Lambda systems whose two-photon resonances are ``Z``
  apart, B tuned to its bright resonance;
* two degenerate Lambda systems differing only in coupling strengths.

Infinite ratios (``gamma == 0`` with D exactly dark) are returned as
``math.inf`` rather than raised, so scans through ``gamma = 0`` complete.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .analytic import ApproximationWarning, derived_rates, rho33_exact
from .params import (AtomParams, CoherenceModel, ConfigError, LaserDrive, SystemConfig,
                     config_to_dict, validate_config)
from .scan import Axis, SpectralScan, evaluate_grid

PEAK_GRID_POINTS = 41


class ScenarioKind(str, enum.Enum):
    SINGLE_PHOTON = "single-photon"
    RESONANT = "resonant"
    TWO_LAMBDA = "two-lambda"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class DiscriminationScenario:
    """One discrimination set-up.

    ``cfg`` describes the D manifold. ``Z`` is the two-photon offset between
    the manifolds, ``C`` the B/D probe coupling ratio of the resonant case,
    and ``C1``, ``C2`` the probe and pump coupling ratios of the degenerate
    case.
    """

    kind: ScenarioKind
    cfg: SystemConfig
    Z: float = 0.0
    C: float = 1.0
    C1: float = 1.0
    C2: float = 1.0

    def __post_init__(self):
        errors = []
        if not (math.isfinite(self.Z) and self.Z >= 0):
            errors.append("Z negative or non-finite")
        for name in ("C", "C1", "C2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                errors.append(f"{name} must be positive")
        if errors:
            raise ConfigError(errors)
        object.__setattr__(self, "kind", ScenarioKind(self.kind))


def _ratio(num: float, den: float) -> float:
    if den == 0.0:
        return math.inf if num > 0 else math.nan
    return num / den


# -- benchmark and resonant case ---------------------------------------------

def benchmark_single_photon_r(Z: float, laser_linewidth: float) -> float:
    """Ratio for single-photon excitation of two lines ``Z`` apart."""
    if not laser_linewidth > 0:
        raise ValueError("laser_linewidth must be positive")
    return (2.0 * Z / laser_linewidth) ** 2 + 1.0


def ratio_resonant(cfg: SystemConfig, C: float = 1.0) -> float:
    """Exact B/D ratio with both lasers on resonance.

    B is a two-level atom driven at ``C * omega_1`` with the same total
    decay rate; D sits at its dark resonance.
    """
    d, atom = cfg.drive, cfg.atom
    if abs(d.delta_1) > 1e-12 or abs(d.delta_2) > 1e-12:
        raise ValueError("ratio_resonant needs delta_1 == delta_2 == 0")
    g, G = cfg.gamma, atom.gamma_total
    o1s, o2s = d.omega_1 ** 2, d.omega_2 ** 2
    Y = atom.gamma_2 * o1s + atom.gamma_1 * o2s
    num = (o1s + o2s) * Y + 2.0 * g * (3.0 * o1s * o2s + 2.0 * cfg.coherence.gamma_13 * Y)
    den = 2.0 * g * o2s * (2.0 * o1s + G ** 2 / C ** 2)
    return _ratio(num, den)


def _weak_probe_ok(cfg: SystemConfig) -> bool:
    d, atom = cfg.drive, cfg.atom
    o1s, o2s = d.omega_1 ** 2, d.omega_2 ** 2
    pump_bound = o2s if atom.gamma_2 == 0 else min(o2s, atom.gamma_1 / atom.gamma_2 * o2s)
    return o1s <= 1e-2 * pump_bound


def ratio_resonant_weak_probe(cfg: SystemConfig, C: float = 1.0, check: bool = True) -> float:
    """Weak-probe limit of :func:`ratio_resonant` for a non-saturating probe."""
    atom = cfg.atom
    if check and not (_weak_probe_ok(cfg)
                      and cfg.drive.omega_1 ** 2 <= 1e-2 * atom.gamma_total ** 2):
        warnings.warn("weak-probe ratio outside validity", ApproximationWarning, stacklevel=2)
    return _ratio(cfg.drive.omega_2 ** 2 * atom.gamma_1 * C ** 2,
                  2.0 * cfg.gamma * atom.gamma_total ** 2)


def ratio_resonant_saturated_probe(cfg: SystemConfig, check: bool = True) -> float:
    """Weak-probe limit of :func:`ratio_resonant` for a probe saturating B."""
    atom = cfg.atom
    if check and not (_weak_probe_ok(cfg)
                      and cfg.drive.omega_1 ** 2 >= 1e2 * atom.gamma_total ** 2):
        warnings.warn("saturated-probe ratio outside validity", ApproximationWarning,
                      stacklevel=2)
    return _ratio(cfg.drive.omega_2 ** 2 * atom.gamma_1,
                  4.0 * cfg.gamma * cfg.drive.omega_1 ** 2)


# -- two offset Lambda systems ----------------------------------------------

def _at_raman(cfg: SystemConfig, delta: float) -> SystemConfig:
    """Same pump, probe moved to two-photon detuning ``delta``."""
    return cfg.with_drive(delta_1=cfg.drive.delta_2 + delta)


def ratio_two_lambda(scenario: DiscriminationScenario, delta: float) -> float:
    """``rho33(delta) / rho33(delta - Z)`` for two offset Lambda systems.

    ``delta`` is the two-photon detuning of B. Both manifolds see the same
    lasers; the pump detuning of ``scenario.cfg`` is kept for both and the
    probe detuning follows from the two-photon detuning.
    """
    if scenario.kind is not ScenarioKind.TWO_LAMBDA:
        raise ValueError("ratio_two_lambda needs a two-lambda scenario")
    cfg = scenario.cfg
    return _ratio(rho33_exact(_at_raman(cfg, delta)),
                  rho33_exact(_at_raman(cfg, delta - scenario.Z)))


def _r_closed_form(scenario: DiscriminationScenario) -> float:
    cfg = scenario.cfg
    g, Z = cfg.gamma, scenario.Z
    o2s = cfg.drive.omega_2 ** 2
    if not o2s > 0:
        raise ValueError("omega_2 must be positive")
    den = (2.0 * cfg.alpha * cfg.atom.gamma_total * Z ** 2 / o2s + g) * g
    return _ratio(Z ** 2 + g ** 2, den)


def r_infinity(scenario: DiscriminationScenario) -> float:
    """Ratio with B at bright resonance and the probe very far detuned."""
    return _r_closed_form(scenario)


def r_eit(scenario: DiscriminationScenario) -> float:
    """Ratio with the light shift equal to ``Z`` (D dark while B bright), Zeno regime.

    Numerically identical to :func:`r_infinity`.
    """
    return _r_closed_form(scenario)


def r_eit_rates(scenario: DiscriminationScenario) -> float:
    """:func:`r_eit` written with the pump scattering rate of ``scenario.cfg``."""
    cfg = scenario.cfg
    g, Z = cfg.gamma, scenario.Z
    R = derived_rates(cfg).scatter_rate
    return _ratio(Z ** 2 + g ** 2, (cfg.alpha * R / 2.0 + g) * g)


@dataclass(frozen=True)
class OptimalSettings:
    omega_2: float
    delta_2: float
    omega_1_bound: float


def optimal_settings(Z: float, gamma: float, omega2_max: float,
                     gamma_total: float = 1.0) -> OptimalSettings:
    """Pump detuning and probe bound that maximise the ratio at full pump power.

    The pump detuning includes the shift of the absorption minimum at finite
    linewidth; the probe bound is a tenth of the power-broadening limit.
    """
    if not Z > 0:
        raise ValueError("Z must be positive")
    if gamma < 0 or not omega2_max > 0:
        raise ValueError("need gamma >= 0 and omega2_max > 0")
    o2 = omega2_max
    d2 = o2 ** 2 / (4.0 * Z) * (1.0 + gamma * o2 ** 2 / (2.0 * gamma_total * Z ** 2)) - Z
    bound = 0.1 * max(Z * gamma_total / o2, abs(d2) * gamma / o2)
    return OptimalSettings(o2, d2, bound)


# -- degenerate manifolds ------------------------------------------------------

def ratio_degenerate(cfg: SystemConfig, C1: float, C2: float) -> float:
    """Ratio for two degenerate Lambda systems with coupling ratios ``C1``, ``C2``.

    B (Rabi frequencies scaled by ``C1``, ``C2`` and the 3->1 decay by
    ``C1**2``) sits at its bright resonance; D is evaluated at the same
    lasers, i.e. ``(C2**2 - 1)`` light shifts away from its own peak.
    Zeno regime assumed.
    """
    r = derived_rates(cfg)
    g, a, g1 = cfg.gamma, cfg.alpha, cfg.atom.gamma_1
    R, oe2, ls = r.scatter_rate, r.omega_eff ** 2, r.light_shift
    bright = (C1 ** 2 * C2 ** 2 * oe2 / (2.0 * g1 * C1 ** 2)) / (a * C2 ** 2 * R / 2.0 + g)
    dark = (oe2 * (a * R * C2 ** 4 / 2.0 + g) / (2.0 * g1)
            / (((C2 ** 2 - 1.0) * ls) ** 2 + (a * R / 2.0 + g) ** 2))
    return _ratio(bright, dark)


def ratio_degenerate_limit(cfg: SystemConfig, C2: float) -> float:
    """:func:`ratio_degenerate` when pump scattering is negligible against gamma."""
    ls = derived_rates(cfg).light_shift
    g = cfg.gamma
    if g == 0.0:
        return math.inf
    return (C2 * (C2 ** 2 - 1.0) * ls) ** 2 / g ** 2 + C2 ** 2


def degenerate_bright_config(cfg: SystemConfig, C1: float, C2: float) -> SystemConfig:
    """Full B-manifold config for the degenerate case.

    Rabi frequencies are scaled by ``C1``/``C2``, the 3->1 decay by
    ``C1**2``; coherence decay rates are copied from D.
    """
    a = cfg.atom
    g1 = C1 ** 2 * a.gamma_1
    atom = AtomParams(g1 + a.gamma_2, g1, a.gamma_2, True)
    drive = replace(cfg.drive, omega_1=C1 * cfg.drive.omega_1,
                    omega_2=C2 * cfg.drive.omega_2)
    c = cfg.coherence
    coherence = CoherenceModel.explicit(c.gamma_13, c.gamma_23, c.gamma_12, atom.gamma_total)
    return validate_config(SystemConfig(atom, drive, coherence, cfg.topology))


# -- bright-peak tracking ----------------------------------------------------

@dataclass(frozen=True)
class PeakLocation:
    delta: float
    rho33: float
    ok: bool


def _peak_width(cfg: SystemConfig) -> float:
    """Rough FWHM of the narrow dressed-state resonance, used to size the search."""
    d, atom = cfg.drive, cfg.atom
    G = atom.gamma_total
    root = math.hypot(d.delta_2, d.omega_2)
    s = 0.0 if root == 0 else 0.5 * (1.0 - abs(d.delta_2) / root)
    g1 = atom.gamma_1 if atom.gamma_1 > 0 else G
    w = G * s + math.sqrt(s) * d.omega_1 * math.sqrt(2.0 * G / g1) + 2.0 * cfg.gamma
    return w if w > 0 else 0.5 * G


def bright_peak_detuning(cfg: SystemConfig) -> PeakLocation:
    """Two-photon detuning of the bright-resonance maximum of rho33.

    The search is centred on the narrow dressed state of the pump-coupled
    pair and excludes the dark point at zero. ``ok`` is False when the
    maximum lands on the edge of the search interval.
    """
    d = cfg.drive
    sign = 1.0 if d.delta_2 >= 0 else -1.0
    x0 = 0.5 * (-d.delta_2 + sign * math.hypot(d.delta_2, d.omega_2))
    w = _peak_width(cfg)
    near = min(10.0 * w, 0.9 * abs(x0)) if x0 != 0 else 10.0 * w
    lo, hi = (x0 - near, x0 + 10.0 * w) if sign > 0 else (x0 - 10.0 * w, x0 + near)

    def rho(x):
        return rho33_exact(_at_raman(cfg, x))

    xs = np.linspace(lo, hi, PEAK_GRID_POINTS)
    ys = np.array([rho(x) for x in xs])
    i = int(np.argmax(ys))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    res = minimize_scalar(lambda x: -rho(x), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-6 * w})
    x, y = (float(res.x), -float(res.fun)) if -res.fun >= ys[i] else (float(xs[i]), float(ys[i]))
    return PeakLocation(x, y, 0 < i < len(xs) - 1)


# -- surface scan --------------------------------------------------------------

TRACKING_MODES = ("peak", "light-shift", "none")
_GRID_FIELDS = ("omega_1", "omega_2", "delta_1", "delta_2", "gamma", "Z")


def apply_coordinates(cfg: SystemConfig, names, coords) -> tuple[SystemConfig, dict]:
    """Set drive fields (and ``gamma`` as equal laser linewidths) from grid coordinates."""
    changes, extra = {}, {}
    for name, value in zip(names, coords):
        if name == "gamma":
            changes["linewidth_1"] = changes["linewidth_2"] = float(value)
        elif name in LaserDrive.__dataclass_fields__:
            changes[name] = float(value)
        else:
            extra[name] = float(value)
    return (cfg.with_drive(**changes) if changes else cfg), extra


def _dressed_delta(cfg: SystemConfig) -> float:
    d = cfg.drive
    sign = 1.0 if d.delta_2 >= 0 else -1.0
    return 0.5 * (-d.delta_2 + sign * math.hypot(d.delta_2, d.omega_2))


def tracked_delta(cfg: SystemConfig, tracking: str) -> tuple[float, bool]:
    """Two-photon detuning of B for a tracking mode, and whether a peak was resolved.

    When the bright maximum cannot be resolved (light shift buried under the
    linewidth) ``peak`` falls back to the dressed-state position.
    """
    if tracking == "peak":
        p = bright_peak_detuning(cfg)
        return (p.delta, True) if p.ok else (_dressed_delta(cfg), False)
    if tracking == "light-shift":
        return _dressed_delta(cfg), True
    return cfg.drive.delta, True


@dataclass(frozen=True)
class _SurfacePoint:
    scenario: DiscriminationScenario
    names: tuple[str, ...]
    tracking: str

    def __call__(self, *coords) -> tuple[float, bool, bool]:
        try:
            cfg, extra = apply_coordinates(self.scenario.cfg, self.names, coords)
            validate_config(cfg)
            sc = replace(self.scenario, cfg=cfg, Z=extra.get("Z", self.scenario.Z))
            if sc.kind is ScenarioKind.RESONANT:
                value, resolved = ratio_resonant(cfg, sc.C), True
            else:
                delta, resolved = tracked_delta(cfg, self.tracking)
                value = ratio_two_lambda(sc, delta)
        except (ConfigError, ArithmeticError, ValueError):
            return math.nan, False, True
        return value, not math.isnan(value), resolved


def scan_surface(scenario: DiscriminationScenario, axis1: Axis, axis2: Axis,
                 tracking: str = "peak", threads: int | None = None) -> SpectralScan:
    """Ratio on a two-parameter grid.

    Axis names are drive fields, ``gamma`` (equal laser linewidths) or ``Z``.
    For the two-lambda scenario B is placed according to ``tracking``:
    ``peak`` follows the numerically located bright maximum, ``light-shift``
    the dressed-state position (also the fallback when no peak is
    resolved; such points are counted in the metadata), ``none`` keeps the two-photon detuning of
    ``scenario.cfg``. Points that fail are stored as NaN and flagged invalid.
    """
    if tracking not in TRACKING_MODES:
        raise ValueError(f"tracking must be one of {TRACKING_MODES}")
    for ax in (axis1, axis2):
        if ax.name not in _GRID_FIELDS:
            raise ValueError(f"unknown grid parameter {ax.name!r}")
    if scenario.kind not in (ScenarioKind.TWO_LAMBDA, ScenarioKind.RESONANT):
        raise ValueError(f"surface scans not supported for {scenario.kind.value}")
    func = _SurfacePoint(scenario, (axis1.name, axis2.name), tracking)
    values, valid, resolved = evaluate_grid(func, [axis1, axis2], threads)
    meta = {"scenario": scenario.kind.value, "Z": scenario.Z, "C": scenario.C,
            "tracking": tracking, "config": config_to_dict(scenario.cfg),
            "unresolved_peaks": int(np.sum(~resolved))}
    return SpectralScan([axis1, axis2], values, valid, "r", meta)
