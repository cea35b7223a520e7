"""Physical parameter records for a laser-driven three-level atom.

All rates and frequencies are angular and share one unit; the CLI and the
test-suite use units where the upper-state decay rate is 1.
"""
from __future__ import annotations

import dataclasses
import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

CLOSED_TOL = 1e-12


class ConfigError(ValueError):
    """Raised when a configuration violates one or more invariants.

    ``errors`` holds one message per violated invariant, each starting with
    the offending field name.
    """

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class Topology(str, enum.Enum):
    LAMBDA = "lambda"
    LADDER = "ladder"


class CoherenceMode(str, enum.Enum):
    DERIVED_LAMBDA = "derived-lambda"
    DERIVED_LADDER = "derived-ladder"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class AtomParams:
    """Decay rates of the upper level.

    For a Lambda atom ``gamma_1``/``gamma_2`` are the branching rates 3->1 and
    3->2. For a ladder atom ``gamma_2`` is the decay rate of the top level 2
    into 3, and a closed ladder has ``gamma_total == gamma_1``.
    """

    gamma_total: float = 1.0
    gamma_1: float = 0.5
    gamma_2: float = 0.5
    closed: bool = True


@dataclass(frozen=True)
class LaserDrive:
    omega_1: float
    omega_2: float
    delta_1: float = 0.0
    delta_2: float = 0.0
    linewidth_1: float = 0.0
    linewidth_2: float = 0.0

    @property
    def delta(self) -> float:
        """Two-photon (Raman) detuning."""
        return self.delta_1 - self.delta_2


@dataclass(frozen=True)
class CoherenceModel:
    gamma_13: float
    gamma_23: float
    gamma_12: float
    alpha: float
    mode: CoherenceMode = CoherenceMode.EXPLICIT

    @classmethod
    def explicit(cls, gamma_13: float, gamma_23: float, gamma_12: float,
                 gamma_total: float = 1.0) -> "CoherenceModel":
        return cls(gamma_13, gamma_23, gamma_12, 2.0 * gamma_13 / gamma_total,
                   CoherenceMode.EXPLICIT)


@dataclass(frozen=True)
class SystemConfig:
    atom: AtomParams
    drive: LaserDrive
    coherence: CoherenceModel
    topology: Topology = Topology.LAMBDA

    # shorthands used throughout the formula modules
    @property
    def gamma(self) -> float:
        """Ground-state coherence decay rate (gamma_12)."""
        return self.coherence.gamma_12

    @property
    def alpha(self) -> float:
        return self.coherence.alpha

    def with_drive(self, **changes: float) -> "SystemConfig":
        """Copy with drive fields replaced; derived coherence rates follow."""
        drive = dataclasses.replace(self.drive, **changes)
        coherence = self.coherence
        if coherence.mode is not CoherenceMode.EXPLICIT:
            coherence = derive_coherence_rates(self.atom, drive, self.topology)
        return SystemConfig(self.atom, drive, coherence, self.topology)

    def with_coherence(self, **changes: float) -> "SystemConfig":
        """Copy with explicit coherence rates; alpha is recomputed."""
        c = dataclasses.replace(self.coherence, **changes)
        c = CoherenceModel.explicit(c.gamma_13, c.gamma_23, c.gamma_12,
                                    self.atom.gamma_total)
        return SystemConfig(self.atom, self.drive, c, self.topology)


def derive_coherence_rates(atom: AtomParams, drive: LaserDrive,
                           topology: Topology = Topology.LAMBDA) -> CoherenceModel:
    """Coherence decay rates from spontaneous decay and laser linewidths.

    Lambda: ``G13 = (G + g1)/2``, ``G23 = (G + g2)/2``, ``g = (g1 + g2)/2``
    (independently dephasing lasers). Ladder: the top level decays at
    ``G2``, so ``G23 = (G + G2 + g2)/2`` and ``g = (G2 + g1 + g2)/2``.
    """
    errors = _atom_errors(atom) + _drive_errors(drive)
    if errors:
        raise ConfigError(errors)
    big = atom.gamma_total
    g1, g2 = drive.linewidth_1, drive.linewidth_2
    gamma_13 = (big + g1) / 2.0
    if Topology(topology) is Topology.LADDER:
        gamma_23 = (big + atom.gamma_2 + g2) / 2.0
        gamma_12 = (atom.gamma_2 + g1 + g2) / 2.0
        mode = CoherenceMode.DERIVED_LADDER
    else:
        gamma_23 = (big + g2) / 2.0
        gamma_12 = (g1 + g2) / 2.0
        mode = CoherenceMode.DERIVED_LAMBDA
    return CoherenceModel(gamma_13, gamma_23, gamma_12, 2.0 * gamma_13 / big, mode)


def _atom_errors(atom: AtomParams) -> list[str]:
    errors = []
    for name in ("gamma_total", "gamma_1", "gamma_2"):
        value = getattr(atom, name)
        if not math.isfinite(value) or value < 0:
            errors.append(f"{name} negative or non-finite")
    return errors


def _drive_errors(drive: LaserDrive) -> list[str]:
    errors = []
    for name in ("omega_1", "omega_2", "linewidth_1", "linewidth_2"):
        value = getattr(drive, name)
        if not math.isfinite(value) or value < 0:
            errors.append(f"{name} negative or non-finite")
    for name in ("delta_1", "delta_2"):
        if not math.isfinite(getattr(drive, name)):
            errors.append(f"{name} non-finite")
    return errors


def config_errors(cfg: SystemConfig) -> list[str]:
    """List every violated invariant of ``cfg`` (empty when valid)."""
    atom = cfg.atom
    errors = _atom_errors(atom) + _drive_errors(cfg.drive)
    if atom.gamma_total <= 0 and not errors:
        errors.append("gamma_total must be positive")
    topology = Topology(cfg.topology)
    if atom.closed and not errors:
        if topology is Topology.LAMBDA:
            excess = atom.gamma_1 + atom.gamma_2 - atom.gamma_total
            if excess > CLOSED_TOL * atom.gamma_total:
                errors.append("gamma_1: branching exceeds total")
            elif excess < -CLOSED_TOL * atom.gamma_total:
                errors.append("gamma_1: branching below total for a closed atom")
        elif abs(atom.gamma_total - atom.gamma_1) > CLOSED_TOL * atom.gamma_total:
            errors.append("gamma_1: closed ladder requires gamma_1 == gamma_total")
    c = cfg.coherence
    for name in ("gamma_13", "gamma_23", "gamma_12"):
        value = getattr(c, name)
        if not math.isfinite(value) or value < 0:
            errors.append(f"{name} negative or non-finite")
    if not errors and c.alpha != 2.0 * c.gamma_13 / atom.gamma_total:
        errors.append("alpha inconsistent with 2*gamma_13/gamma_total")
    return errors


def validate_config(cfg: SystemConfig) -> SystemConfig:
    """Return ``cfg`` unchanged if valid, else raise :class:`ConfigError`."""
    errors = config_errors(cfg)
    if errors:
        raise ConfigError(errors)
    return cfg


def make_config(omega_1: float, omega_2: float, delta_1: float = 0.0,
                delta_2: float = 0.0, *, gamma: float = 0.0,
                gamma_1: float = 0.5, gamma_2: float = 0.5,
                gamma_total: float | None = None,
                topology: Topology | str = Topology.LAMBDA) -> SystemConfig:
    """Convenience constructor with two lasers of equal linewidth ``gamma``.

    Equal linewidths make ``gamma_12 == gamma`` and ``gamma_13 == gamma_23``
    for a Lambda atom, which is the case the closed-form results cover.
    """
    topology = Topology(topology)
    if gamma_total is None:
        gamma_total = gamma_1 if topology is Topology.LADDER else gamma_1 + gamma_2
    atom = AtomParams(gamma_total, gamma_1, gamma_2)
    drive = LaserDrive(omega_1, omega_2, delta_1, delta_2, gamma, gamma)
    cfg = SystemConfig(atom, drive, derive_coherence_rates(atom, drive, topology),
                       topology)
    return validate_config(cfg)


# -- JSON ------------------------------------------------------------------

_SECTIONS = {"atom": AtomParams, "drive": LaserDrive, "coherence": CoherenceModel}


def _check_keys(section: str, data: Mapping[str, Any], allowed: set[str],
                errors: list[str]) -> None:
    for key in data:
        if key not in allowed:
            errors.append(f"{section}.{key}: unknown key")


def config_from_dict(data: Mapping[str, Any]) -> SystemConfig:
    """Build a config from a JSON-style mapping.

    Keys must match the dataclass field names exactly. A ``coherence``
    section switches to explicit coherence rates (``alpha`` may be omitted
    and is recomputed); without it the rates are derived from the
    linewidths.
    """
    errors: list[str] = []
    _check_keys("config", data, {"atom", "drive", "coherence", "topology"}, errors)
    for required in ("atom", "drive"):
        if required not in data:
            errors.append(f"{required}: missing section")
    if errors:
        raise ConfigError(errors)
    try:
        topology = Topology(data.get("topology", "lambda"))
    except ValueError:
        raise ConfigError([f"topology: unknown value {data.get('topology')!r}"])
    parts = {}
    for section in ("atom", "drive"):
        cls = _SECTIONS[section]
        names = {f.name for f in dataclasses.fields(cls)}
        _check_keys(section, data[section], names, errors)
    if errors:
        raise ConfigError(errors)
    try:
        parts["atom"] = AtomParams(**data["atom"])
        parts["drive"] = LaserDrive(**data["drive"])
    except TypeError as exc:
        raise ConfigError([str(exc)])
    if "coherence" in data:
        raw = dict(data["coherence"])
        _check_keys("coherence", raw, {"gamma_13", "gamma_23", "gamma_12", "alpha", "mode"},
                    errors)
        missing = [k for k in ("gamma_13", "gamma_23", "gamma_12") if k not in raw]
        errors.extend(f"coherence.{k}: missing" for k in missing)
        if errors:
            raise ConfigError(errors)
        coherence = CoherenceModel.explicit(raw["gamma_13"], raw["gamma_23"],
                                            raw["gamma_12"], parts["atom"].gamma_total)
        if "alpha" in raw and not math.isclose(raw["alpha"], coherence.alpha,
                                               rel_tol=1e-12):
            raise ConfigError(["alpha inconsistent with 2*gamma_13/gamma_total"])
    else:
        coherence = derive_coherence_rates(parts["atom"], parts["drive"], topology)
    return validate_config(SystemConfig(parts["atom"], parts["drive"], coherence, topology))


def config_to_dict(cfg: SystemConfig) -> dict[str, Any]:
    out: dict[str, Any] = {
        "atom": dataclasses.asdict(cfg.atom),
        "drive": dataclasses.asdict(cfg.drive),
        "topology": Topology(cfg.topology).value,
    }
    if cfg.coherence.mode is CoherenceMode.EXPLICIT:
        c = cfg.coherence
        out["coherence"] = {"gamma_13": c.gamma_13, "gamma_23": c.gamma_23,
                            "gamma_12": c.gamma_12}
    return out


def load_config(path: str | Path) -> SystemConfig:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"invalid JSON: {exc}"])
    if not isinstance(data, dict):
        raise ConfigError(["config: top level must be an object"])
    return config_from_dict(data)
