"""Qubit channels: thermal (generalized amplitude damping) noise, rotations,
and the noisy unitary obtained by following a rotation with thermal noise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    I2,
    PAULIS,
    DensityOperator,
    InvalidInput,
    as_cmatrix,
    density,
)

TWO_PI = 2.0 * math.pi
E_X = (1.0, 0.0, 0.0)
E_Y = (0.0, 1.0, 0.0)
E_Z = (0.0, 0.0, 1.0)
AXIS_TOL = 1e-12


class UnphysicalTemperatureWarning(UserWarning):
    """p < 1/2 has no finite positive-temperature interpretation."""


def wrap_phase(xi: float) -> float:
    """Map any real phase into [0, 2*pi)."""
    w = math.fmod(float(xi), TWO_PI)
    if w < 0.0:
        w += TWO_PI
    # fmod can round a tiny negative up to exactly 2*pi
    return 0.0 if w >= TWO_PI else w


def phase_sin_cos(xi: float) -> tuple[float, float]:
    """``(sin xi, cos xi)`` with exact values at integer multiples of pi/2.

    ``math.sin(math.pi)`` is 1.2e-16, not 0; exact zeros keep the Fisher
    information exactly zero at xi in {0, pi}.
    """
    xi = float(xi)
    if math.remainder(xi, 0.5 * math.pi) == 0.0:
        k = round(xi / (0.5 * math.pi))
        return ((0.0, 1.0), (1.0, 0.0), (0.0, -1.0), (-1.0, 0.0))[k % 4]
    return math.sin(xi), math.cos(xi)


@dataclass(frozen=True)
class ThermalNoiseParams:
    """Generalized amplitude damping parameters.

    ``p`` is the ground-state probability at equilibrium and ``gamma`` the
    damping factor.  Values p < 1/2 are admitted (the Kraus algebra is fine)
    but trigger :class:`UnphysicalTemperatureWarning`.
    """

    p: float
    gamma: float

    def __post_init__(self):
        p, g = float(self.p), float(self.gamma)
        if not (0.0 <= p <= 1.0):
            raise InvalidInput(f"p must lie in [0, 1], got {p}")
        if not (0.0 <= g <= 1.0):
            raise InvalidInput(f"gamma must lie in [0, 1], got {g}")
        if p < 0.5:
            warnings.warn(
                f"p={p} < 1/2 does not correspond to a positive temperature",
                UnphysicalTemperatureWarning,
                stacklevel=3,
            )
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "gamma", g)

    @property
    def t_p(self) -> float:
        """Effective temperature 2(1 - p), in [0, 1] for physical p."""
        return effective_temperature(self.p)

    @classmethod
    def from_effective_temperature(cls, t_p: float, gamma: float) -> "ThermalNoiseParams":
        return cls(p_from_effective_temperature(t_p), gamma)


@dataclass(frozen=True)
class UnitaryParams:
    """Rotation axis (unit 3-vector) and phase, the phase wrapped into [0, 2*pi)."""

    axis: tuple = E_Z
    xi: float = 0.0

    def __post_init__(self):
        n = tuple(float(x) for x in self.axis)
        if len(n) != 3 or not all(math.isfinite(x) for x in n):
            raise InvalidInput(f"axis must be a finite 3-vector, got {self.axis!r}")
        if abs(math.sqrt(sum(x * x for x in n)) - 1.0) > AXIS_TOL:
            raise InvalidInput(f"axis {n} is not a unit vector")
        if not math.isfinite(float(self.xi)):
            raise InvalidInput("phase must be finite")
        object.__setattr__(self, "axis", n)
        object.__setattr__(self, "xi", wrap_phase(self.xi))

    @property
    def is_z(self) -> bool:
        return self.axis == E_Z


@dataclass(frozen=True)
class KrausChannel:
    """Ordered Kraus operators satisfying sum_k K_k^dagger K_k = I."""

    ops: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        ops = as_cmatrix(np.asarray(self.ops)).copy()
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3:
            raise InvalidInput("Kraus operators must be a list of square matrices")
        defect = completeness_defect(ops)
        if defect > self.tol:
            raise InvalidInput(f"Kraus operators are not complete (defect {defect:.3g})")
        ops.flags.writeable = False
        object.__setattr__(self, "ops", ops)

    @property
    def dim(self) -> int:
        return self.ops.shape[-1]

    def __len__(self) -> int:
        return self.ops.shape[0]

    def __iter__(self):
        return iter(self.ops)

    def __call__(self, rho) -> DensityOperator:
        return apply_channel(self, rho)


def completeness_defect(ops) -> float:
    """Max-abs entry of sum_k K_k^dagger K_k - I."""
    ops = np.asarray(ops)
    s = np.einsum("kji,kjl->il", ops.conj(), ops)
    return float(np.max(np.abs(s - np.eye(ops.shape[-1]))))


def identity_channel(dim: int = 2) -> KrausChannel:
    return KrausChannel(np.eye(dim, dtype=complex)[None])


def unitary_channel(u) -> KrausChannel:
    return KrausChannel(np.asarray(u)[None])


@dataclass(frozen=True)
class AffineBlochMap:
    """Bloch-picture of a qubit channel: r -> A r + c."""

    A: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a = np.array(self.A, dtype=float).reshape(3, 3)
        c = np.array(self.c, dtype=float).reshape(3)
        a.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "c", c)

    def __call__(self, r) -> np.ndarray:
        return self.A @ np.asarray(r, dtype=float) + self.c

    def compose(self, first: "AffineBlochMap") -> "AffineBlochMap":
        """The map ``r -> self(first(r))``."""
        return AffineBlochMap(self.A @ first.A, self.A @ first.c + self.c)


# ---------------------------------------------------------------------------
# Thermal noise
# ---------------------------------------------------------------------------

def thermal_kraus(params: ThermalNoiseParams) -> KrausChannel:
    """The four Kraus operators of thermal noise, in the fixed order Λ1..Λ4."""
    p, g = params.p, params.gamma
    sp, sq = math.sqrt(p), math.sqrt(1.0 - p)
    sg, s1g = math.sqrt(g), math.sqrt(1.0 - g)
    ops = np.array(
        [
            [[sp, 0.0], [0.0, sp * s1g]],
            [[0.0, sp * sg], [0.0, 0.0]],
            [[sq * s1g, 0.0], [0.0, sq]],
            [[0.0, 0.0], [sq * sg, 0.0]],
        ],
        dtype=complex,
    )
    return KrausChannel(ops)


def apply_kraus(ops, rho: np.ndarray) -> np.ndarray:
    """sum_k K_k rho K_k^dagger; ``rho`` may be a stack (..., d, d)."""
    ops = np.asarray(ops)
    return np.einsum("kab,...bc,kdc->...ad", ops, rho, ops.conj())


def apply_channel(ch: KrausChannel, rho, tol: float = DEFAULT_TOL) -> DensityOperator:
    rho = density(rho, tol)
    if rho.dim != ch.dim:
        raise InvalidInput(f"channel acts on dim {ch.dim}, state has dim {rho.dim}")
    out = apply_kraus(ch.ops, rho.mat)
    return DensityOperator(0.5 * (out + out.conj().T), tol)


def thermal_output(params: ThermalNoiseParams, rho00: float, rho01: complex) -> np.ndarray:
    """Entrywise closed form of the thermal noise acting on a qubit state."""
    p, g = params.p, params.gamma
    s = math.sqrt(1.0 - g)
    rho01 = complex(rho01)
    return np.array(
        [
            [(1 - g) * rho00 + p * g, s * rho01],
            [s * rho01.conjugate(), (1 - g) * (1 - rho00) + (1 - p) * g],
        ],
        dtype=complex,
    )


def bloch_affine_of_thermal(params: ThermalNoiseParams) -> AffineBlochMap:
    g = params.gamma
    s = math.sqrt(1.0 - g)
    return AffineBlochMap(np.diag([s, s, 1.0 - g]), [0.0, 0.0, (2 * params.p - 1) * g])


# ---------------------------------------------------------------------------
# Rotations
# ---------------------------------------------------------------------------

def unitary(params: UnitaryParams) -> np.ndarray:
    """exp(-i xi/2 n.sigma) = cos(xi/2) I - i sin(xi/2) n.sigma."""
    half = 0.5 * params.xi
    n_sigma = np.einsum("i,ijk->jk", np.asarray(params.axis), PAULIS)
    return math.cos(half) * I2 - 1j * math.sin(half) * n_sigma


def rotation_matrix(params: UnitaryParams) -> np.ndarray:
    """Rotation of R^3 by angle xi about the axis (Rodrigues form)."""
    n = np.asarray(params.axis)
    s, c = phase_sin_cos(params.xi)
    cross = np.array([[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]])
    return c * np.eye(3) + s * cross + (1.0 - c) * np.outer(n, n)


def noisy_unitary_channel(noise: ThermalNoiseParams, u: UnitaryParams) -> KrausChannel:
    """Kraus operators Λ_j U_xi, j = 1..4."""
    return KrausChannel(thermal_kraus(noise).ops @ unitary(u))


def noisy_unitary_affine(noise: ThermalNoiseParams, u: UnitaryParams) -> AffineBlochMap:
    """Bloch map r -> A R_xi r + c of the noisy unitary channel."""
    amap = bloch_affine_of_thermal(noise)
    return AffineBlochMap(amap.A @ rotation_matrix(u), amap.c)


# ---------------------------------------------------------------------------
# Physical parameter conversions
# ---------------------------------------------------------------------------

def p_from_temperature(energy_gap: float, kT: float) -> float:
    """Boltzmann ground-state probability 1 / (1 + exp(-gap / kT)).

    ``kT == 0`` is taken as the zero-temperature limit p = 1.
    """
    if not energy_gap > 0:
        raise InvalidInput(f"energy gap must be positive, got {energy_gap}")
    if kT < 0:
        raise InvalidInput(f"kT must be nonnegative, got {kT}")
    if kT == 0:
        return 1.0
    return 1.0 / (1.0 + math.exp(-energy_gap / kT))


def effective_temperature(p: float) -> float:
    return 2.0 * (1.0 - p)


def p_from_effective_temperature(t_p: float) -> float:
    if not (0.0 <= t_p <= 2.0):
        raise InvalidInput(f"T_p must lie in [0, 2], got {t_p}")
    return 1.0 - 0.5 * t_p


def gamma_from_time(t: float, tau1: float) -> float:
    """Damping factor 1 - exp(-t / tau1)."""
    if t < 0:
        raise InvalidInput(f"interaction time must be nonnegative, got {t}")
    if not tau1 > 0:
        raise InvalidInput(f"relaxation time must be positive, got {tau1}")
    return -math.expm1(-t / tau1)


def as_axis(v: Sequence[float]) -> tuple:
    """Normalize a 3-vector into a unit axis tuple."""
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if v.shape != (3,) or norm == 0 or not np.isfinite(norm):
        raise InvalidInput(f"cannot build an axis from {v!r}")
    return tuple(float(x) for x in v / norm)
