"""Numerical optical Bloch equations for the three-level atom.

The generator is kept in two equivalent forms:

* ``Liouvillian.superoperator`` -- complex 9x9 acting on the row-major
  flattening ``rho.reshape(9)`` of an arbitrary 3x3 operator;
* ``Liouvillian.matrix`` -- real 9x9 acting on the real vector
  ``(rho11, rho22, rho33, Re rho12, Im rho12, Re rho13, Im rho13,
  Re rho23, Im rho23)`` of a Hermitian density matrix.

The real form is what the steady-state solver and the time integrator use;
the complex form is needed for resolvents on non-Hermitian operators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .params import SystemConfig, Topology, validate_config

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
# condition number above which the row-replaced system is treated as singular
SINGULAR_COND = 1e12

REAL_BASIS_LABELS = ("rho11", "rho22", "rho33", "re_rho12", "im_rho12",
                     "re_rho13", "im_rho13", "re_rho23", "im_rho23")


class SteadyStateError(ArithmeticError):
    pass


class IntegrationError(ArithmeticError):
    pass


def _real_basis_transform() -> np.ndarray:
    """Matrix T with ``x = T @ rho.reshape(9)`` for Hermitian ``rho``."""
    t = np.zeros((9, 9), dtype=complex)
    for k in range(3):
        t[k, 4 * k] = 1.0
    for row, (i, j) in zip((3, 5, 7), ((0, 1), (0, 2), (1, 2))):
        ij, ji = 3 * i + j, 3 * j + i
        t[row, ij], t[row, ji] = 0.5, 0.5
        t[row + 1, ij], t[row + 1, ji] = -0.5j, 0.5j
    return t


_T = _real_basis_transform()
_T_INV = np.linalg.inv(_T)


def to_real_vector(rho: np.ndarray) -> np.ndarray:
    return (_T @ np.asarray(rho, dtype=complex).reshape(9)).real


def from_real_vector(x: np.ndarray) -> np.ndarray:
    return (_T_INV @ np.asarray(x, dtype=complex)).reshape(3, 3)


@dataclass(frozen=True)
class DensityMatrix3:
    """Hermitian, unit-trace 3x3 state in the basis order (1, 2, 3)."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {rho.shape}")
        object.__setattr__(self, "rho", rho)

    def violations(self, positivity_tol: float = POSITIVITY_TOL) -> list[str]:
        problems = []
        if np.max(np.abs(self.rho - self.rho.conj().T)) > HERMITIAN_TOL:
            problems.append("not Hermitian")
        if abs(np.trace(self.rho) - 1.0) > TRACE_TOL:
            problems.append("trace differs from 1")
        herm = 0.5 * (self.rho + self.rho.conj().T)
        if np.min(np.linalg.eigvalsh(herm)) < -positivity_tol:
            problems.append("negative eigenvalue")
        return problems

    def populations(self) -> np.ndarray:
        return np.diag(self.rho).real.copy()

    def to_real_vector(self) -> np.ndarray:
        return to_real_vector(self.rho)

    @classmethod
    def from_real_vector(cls, x) -> "DensityMatrix3":
        rho = from_real_vector(x)
        # enforce exact Hermiticity lost to rounding in the transform
        return cls(0.5 * (rho + rho.conj().T))

    @classmethod
    def diagonal(cls, p1: float, p2: float, p3: float) -> "DensityMatrix3":
        return cls(np.diag([p1, p2, p3]).astype(complex))


@dataclass(frozen=True)
class Liouvillian:
    matrix: np.ndarray
    superoperator: np.ndarray
    topology: Topology
    trace_preserving: bool

    def apply(self, rho) -> np.ndarray:
        """Time derivative of an arbitrary 3x3 operator."""
        rho = np.asarray(getattr(rho, "rho", rho), dtype=complex)
        return (self.superoperator @ rho.reshape(9)).reshape(3, 3)

    def max_rate(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.matrix))))


def hamiltonian(cfg: SystemConfig) -> np.ndarray:
    """Rotating-frame Hamiltonian (hbar = 1)."""
    d = cfg.drive
    h = np.zeros((3, 3), dtype=complex)
    h[2, 2] = -d.delta_1
    if Topology(cfg.topology) is Topology.LADDER:
        h[1, 1] = -(d.delta_1 + d.delta_2)
    else:
        h[1, 1] = d.delta_2 - d.delta_1
    h[0, 2] = h[2, 0] = d.omega_1 / 2.0
    h[1, 2] = h[2, 1] = d.omega_2 / 2.0
    return h


def _complex_superoperator(cfg: SystemConfig) -> np.ndarray:
    atom, c = cfg.atom, cfg.coherence
    h = hamiltonian(cfg)
    eye = np.eye(3)
    # row-major vec: vec(A X B) = kron(A, B.T) vec(X)
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    idx = lambda i, j: 3 * i + j  # noqa: E731
    if Topology(cfg.topology) is Topology.LADDER:
        # 2 -> 3 at gamma_2, 3 -> 1 at gamma_1, upper level 3 lost at gamma_total
        sup[idx(1, 1), idx(1, 1)] -= atom.gamma_2
        sup[idx(2, 2), idx(1, 1)] += atom.gamma_2
    else:
        sup[idx(1, 1), idx(2, 2)] += atom.gamma_2
    sup[idx(2, 2), idx(2, 2)] -= atom.gamma_total
    sup[idx(0, 0), idx(2, 2)] += atom.gamma_1
    for (i, j), rate in (((0, 2), c.gamma_13), ((1, 2), c.gamma_23), ((0, 1), c.gamma_12)):
        sup[idx(i, j), idx(i, j)] -= rate
        sup[idx(j, i), idx(j, i)] -= rate
    return sup


def build_liouvillian(cfg: SystemConfig) -> Liouvillian:
    """Generator of the optical Bloch equations for ``cfg``.

    Every coherence decays at its own rate from ``cfg.coherence``; population
    transfer follows the topology (Lambda: 3 decays to 1 and 2; ladder: 2
    decays to 3 and 3 to 1).
    """
    validate_config(cfg)
    sup = _complex_superoperator(cfg)
    real = (_T @ sup @ _T_INV).real.copy()
    trace_row = real[:3].sum(axis=0)
    scale = max(1.0, float(np.max(np.abs(real))))
    preserving = bool(np.max(np.abs(trace_row)) <= TRACE_TOL * scale)
    return Liouvillian(real, sup, Topology(cfg.topology), preserving)


def steady_state(L: Liouvillian) -> DensityMatrix3:
    """Unique stationary state of ``L``.

    The rho11 row of the real generator is replaced by the normalisation
    condition and the resulting 9x9 system is solved by dense LU.
    """
    if not L.trace_preserving:
        raise SteadyStateError("open system unsupported in steady state")
    a = L.matrix.copy()
    a[0] = 0.0
    a[0, :3] = 1.0
    if np.linalg.cond(a) > SINGULAR_COND:
        raise SteadyStateError("non-unique steady state")
    b = np.zeros(9)
    b[0] = 1.0
    x = scipy.linalg.lu_solve(scipy.linalg.lu_factor(a), b)
    return DensityMatrix3.from_real_vector(x)


def rk4_propagator(L: Liouvillian, dt: float) -> np.ndarray:
    """One classical RK4 step for the linear system ``x' = L x``."""
    h = dt * L.matrix
    h2 = h @ h
    h3 = h2 @ h
    return np.eye(9) + h + h2 / 2.0 + h3 / 6.0 + h3 @ h / 24.0


def evolve(L: Liouvillian, rho0, t_final: float, dt: float | None = None) -> DensityMatrix3:
    """Fixed-step RK4 integration from ``rho0`` to ``t_final``.

    ``dt`` defaults to ``0.05 / max_rate``; larger steps are rejected. The
    step count is rounded up so that the steps tile ``t_final`` exactly.
    Because the system is linear the N-step map is the N-th power of the
    one-step propagator, which is what gets applied.
    """
    limit = 0.05 / max(L.max_rate(), 1e-300)
    if dt is None:
        dt = limit
    elif dt > limit * (1 + 1e-12):
        raise ValueError(f"dt={dt:g} exceeds RK4 stability bound {limit:g}")
    if t_final < 0:
        raise ValueError("t_final must be non-negative")
    rho0 = rho0 if isinstance(rho0, DensityMatrix3) else DensityMatrix3(rho0)
    x0 = rho0.to_real_vector()
    if t_final == 0:
        return DensityMatrix3.from_real_vector(x0)
    n = max(1, math.ceil(t_final / dt - 1e-9))
    prop = np.linalg.matrix_power(rk4_propagator(L, t_final / n), n)
    x = prop @ x0
    if not np.all(np.isfinite(x)):
        raise IntegrationError("integration diverged")
    if L.trace_preserving and abs(x[:3].sum() - x0[:3].sum()) > 1e-8:
        raise IntegrationError("trace drifted during integration")
    return DensityMatrix3.from_real_vector(x)


def excited_population(rho) -> float:
    rho = getattr(rho, "rho", rho)
    return float(np.real(rho[2, 2]))


def steady_state_rho33(cfg: SystemConfig) -> float:
    return excited_population(steady_state(build_liouvillian(cfg)))
