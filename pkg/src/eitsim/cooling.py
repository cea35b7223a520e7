"""Sideband cooling of a trapped three-level atom in the Lamb-Dicke limit.

The heating (A+) and cooling (A-) coefficients combine a diffusion floor
from recoil of spontaneously emitted photons with the absorption spectrum
of the internal steady state, probed at the trap frequency through the
resolvent of the free-atom generator.

Sign convention: the cooling coefficient uses ``(L0 + i nu)^-1``. With the
detuning convention of :mod:`eitsim.obe` this is the term that peaks when
the probe sits one trap quantum below a resonance (red sideband), as
checked for a two-level atom in the test-suite.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .discrim import apply_coordinates, tracked_delta, TRACKING_MODES
from .obe import build_liouvillian, steady_state
from .params import ConfigError, SystemConfig, config_to_dict, validate_config
from .scan import Axis, SpectralScan, evaluate_grid

RESIDUAL_TOL = 1e-8
LAMB_DICKE_WARN = 0.3


class CoolingError(ArithmeticError):
    pass


@dataclass(frozen=True)
class CoolingParams:
    """Trap and emission parameters on top of an internal-state config.

    ``alpha1``/``alpha2`` describe the projection of the emission pattern on
    the trap axis (1/3 for isotropic emission).
    """

    cfg: SystemConfig
    nu: float
    eta1: float = 0.05
    eta2: float = 0.05
    alpha1: float = 1.0 / 3.0
    alpha2: float = 1.0 / 3.0

    def __post_init__(self):
        errors = []
        if not (math.isfinite(self.nu) and self.nu > 0):
            errors.append("nu must be positive")
        for name in ("eta1", "eta2"):
            value = getattr(self, name)
            if not math.isfinite(value):
                errors.append(f"{name} non-finite")
            elif abs(value) > LAMB_DICKE_WARN:
                warnings.warn(f"{name}={value:g} is outside the Lamb-Dicke regime",
                              stacklevel=3)
        for name in ("alpha1", "alpha2"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                errors.append(f"{name} outside [0, 1]")
        if errors:
            raise ConfigError(errors)


@dataclass(frozen=True)
class CoolingRates:
    a_plus: float
    a_minus: float
    q: float
    n_bar: float
    # largest relative imaginary part left in the symmetrised traces
    imag_residue: float = 0.0

    @property
    def heating(self) -> bool:
        return not self.q < 1.0


def sideband_operator(cfg: SystemConfig, eta1: float, eta2: float) -> np.ndarray:
    """Internal-state part of the first-sideband coupling (real antisymmetric)."""
    v = np.zeros((3, 3))
    v[2, 0] = eta1 * cfg.drive.omega_1 / 2.0
    v[0, 2] = -v[2, 0]
    v[2, 1] = eta2 * cfg.drive.omega_2 / 2.0
    v[1, 2] = -v[2, 1]
    return v


def _resolve(sup: np.ndarray, shift: complex, rhs: np.ndarray) -> np.ndarray:
    a = sup + shift * np.eye(9)
    b = rhs.reshape(9)
    x = scipy.linalg.lu_solve(scipy.linalg.lu_factor(a), b)
    scale = np.linalg.norm(a, np.inf) * np.linalg.norm(x, np.inf) + np.linalg.norm(b, np.inf)
    if scale > 0 and np.linalg.norm(a @ x - b, np.inf) > RESIDUAL_TOL * scale:
        raise CoolingError("resolvent solve residual too large")
    return x.reshape(3, 3)


def _spectral_term(sup, v, rho, nu) -> tuple[float, float]:
    """``Re Tr[2 V (L0 + i nu)^-1 V rho]`` and the relative imaginary residue.

    The residue comes from the symmetrised form
    ``Tr[V X] + Tr[Y V]`` with ``X = (L0 + i nu)^-1 (V rho)`` and
    ``Y = (L0 - i nu)^-1 (rho V)``, which is real for a Hermiticity
    preserving generator.
    """
    x = _resolve(sup, 1j * nu, v @ rho)
    y = _resolve(sup, -1j * nu, rho @ v)
    literal = np.trace(2.0 * v @ x)
    sym = np.trace(v @ x) + np.trace(y @ v)
    size = max(abs(sym), abs(literal), 1e-300)
    return float(literal.real), float(abs(sym.imag) / size)


def rate_coefficient(p: CoolingParams, nu: float) -> float:
    """Diffusion floor plus the spectral term at signed frequency ``nu``.

    ``rate_coefficient(p, p.nu)`` is A- and ``rate_coefficient(p, -p.nu)``
    is A+.
    """
    L = build_liouvillian(p.cfg)
    rho = steady_state(L).rho
    v = sideband_operator(p.cfg, p.eta1, p.eta2)
    return _floor(p, rho) + _spectral_term(L.superoperator, v, rho, nu)[0]


def _floor(p: CoolingParams, rho) -> float:
    a = p.cfg.atom
    return ((a.gamma_1 * p.alpha1 * p.eta1 ** 2 + a.gamma_2 * p.alpha2 * p.eta2 ** 2)
            * float(rho[2, 2].real))


def diffusion_floor(p: CoolingParams) -> float:
    """Recoil contribution shared by A+ and A-."""
    return _floor(p, steady_state(build_liouvillian(p.cfg)).rho)


def cooling_rates(p: CoolingParams) -> CoolingRates:
    """Heating and cooling coefficients, their ratio q and the mean phonon number.

    q >= 1 means net heating; ``n_bar`` is then ``inf``.
    """
    L = build_liouvillian(p.cfg)
    rho = steady_state(L).rho
    v = sideband_operator(p.cfg, p.eta1, p.eta2)
    floor = _floor(p, rho)
    cool, res_c = _spectral_term(L.superoperator, v, rho, p.nu)
    heat, res_h = _spectral_term(L.superoperator, v, rho, -p.nu)
    a_minus, a_plus = floor + cool, floor + heat
    if a_minus > 0:
        q = a_plus / a_minus
    else:
        q = math.nan if a_plus == 0 else math.inf
    n_bar = q / (1.0 - q) if 0 <= q < 1 else math.inf
    return CoolingRates(a_plus, a_minus, q, n_bar, max(res_c, res_h))


@dataclass(frozen=True)
class ThermalState:
    probabilities: np.ndarray
    n_bar: float
    truncation_error: float


def steady_state_thermal(rates: CoolingRates | float, n_max: int) -> ThermalState:
    """Thermal phonon distribution for ratio q, truncated at ``n_max``.

    ``truncation_error`` is the probability mass beyond ``n_max`` in the
    untruncated distribution; the returned probabilities are renormalised.
    """
    q = rates.q if isinstance(rates, CoolingRates) else float(rates)
    if not 0.0 <= q < 1.0:
        raise ValueError("thermal state needs 0 <= q < 1")
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    n = np.arange(n_max + 1)
    p = (1.0 - q) * q ** n
    tail = q ** (n_max + 1)
    p = p / p.sum()
    return ThermalState(p, float(np.dot(n, p)), float(tail))


# -- Fig. 7 style scan ----------------------------------------------------------

def sideband_probe_detuning(p: CoolingParams, tracking: str = "peak") -> float:
    """Probe detuning that puts the red sideband on the bright resonance."""
    delta, _ = tracked_delta(p.cfg, tracking)
    return p.cfg.drive.delta_2 + delta - p.nu


@dataclass(frozen=True)
class _CoolingPoint:
    template: CoolingParams
    names: tuple[str, ...]
    tracking: str

    def __call__(self, *coords) -> tuple[float, bool, bool]:
        try:
            cfg, extra = apply_coordinates(self.template.cfg, self.names, coords)
            validate_config(cfg)
            p = replace(self.template, cfg=cfg, **extra)
            delta, resolved = tracked_delta(cfg, self.tracking)
            p = replace(p, cfg=cfg.with_drive(delta_1=cfg.drive.delta_2 + delta - p.nu))
            r = cooling_rates(p)
        except (ConfigError, ArithmeticError, ValueError):
            return math.nan, False, True
        inv_q = r.a_minus / r.a_plus if r.a_plus > 0 else math.inf
        return inv_q, not math.isnan(inv_q), resolved


_COOLING_GRID_FIELDS = ("omega_1", "omega_2", "delta_2", "gamma", "nu", "eta1", "eta2")


def scan_cooling(template: CoolingParams, axis1: Axis, axis2: Axis,
                 tracking: str = "peak", threads: int | None = None) -> SpectralScan:
    """``1/q`` on a two-parameter grid with the red sideband on the bright peak.

    Heating points (``1/q <= 1``) are kept, not dropped.
    """
    if tracking not in TRACKING_MODES:
        raise ValueError(f"tracking must be one of {TRACKING_MODES}")
    for ax in (axis1, axis2):
        if ax.name not in _COOLING_GRID_FIELDS:
            raise ValueError(f"unknown grid parameter {ax.name!r}")
    func = _CoolingPoint(template, (axis1.name, axis2.name), tracking)
    values, valid, resolved = evaluate_grid(func, [axis1, axis2], threads)
    meta = {"nu": template.nu, "eta1": template.eta1, "eta2": template.eta2,
            "alpha1": template.alpha1, "alpha2": template.alpha2,
            "tracking": tracking, "config": config_to_dict(template.cfg),
            "unresolved_peaks": int(np.sum(~resolved))}
    return SpectralScan([axis1, axis2], values, valid, "inv_q", meta)
