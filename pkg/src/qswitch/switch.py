"""Quantum switch of two qubit channels with a control qubit.

Two evaluation routes are provided and checked against each other:

* generic Kraus sums, valid for any pair of channels and any rotation axis;
* closed forms for two identical thermal-noise rotations about ``e_z``.

Joint probe-control matrices use the control-major ordering of
:mod:`qswitch.linalg`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channels import (
    E_Z,
    KrausChannel,
    ThermalNoiseParams,
    phase_sin_cos,
)
from .linalg import (
    DEFAULT_TOL,
    DensityOperator,
    InvalidInput,
    block_matrix,
    density,
    kron,
    partial_trace,
    pure_state,
)

IMAG_TRACE_TOL = 1e-12


@dataclass(frozen=True)
class ControlState:
    """State of the control qubit.

    ``p_c`` is set when the state was built by :meth:`pure`, i.e. as
    sqrt(p_c)|0> + sqrt(1-p_c)|1>; it is ``None`` for arbitrary states.
    """

    rho_c: DensityOperator
    p_c: Optional[float] = None

    def __post_init__(self):
        rho_c = density(self.rho_c)
        if rho_c.dim != 2:
            raise InvalidInput("control state must be a qubit")
        object.__setattr__(self, "rho_c", rho_c)

    @classmethod
    def pure(cls, p_c: float) -> "ControlState":
        p_c = float(p_c)
        if not 0.0 <= p_c <= 1.0:
            raise InvalidInput(f"p_c must lie in [0, 1], got {p_c}")
        return cls(pure_state([math.sqrt(p_c), math.sqrt(1.0 - p_c)]), p_c)

    @property
    def coherence(self) -> complex:
        """<0_c| rho_c |1_c>."""
        return complex(self.rho_c.mat[0, 1])

    @property
    def mat(self) -> np.ndarray:
        return self.rho_c.mat


@dataclass(frozen=True)
class SwitchOutput:
    joint: DensityOperator
    s00: np.ndarray
    s01: np.ndarray
    q_c: float


def _control(ctrl) -> ControlState:
    if isinstance(ctrl, ControlState):
        return ctrl
    if np.isscalar(ctrl):
        return ControlState.pure(ctrl)
    return ControlState(density(ctrl))


def _require_z(axis) -> None:
    if tuple(float(x) for x in axis) != E_Z:
        raise InvalidInput(
            f"closed forms hold for the axis e_z only (got {tuple(axis)}); "
            "use the generic Kraus-sum route"
        )


# ---------------------------------------------------------------------------
# Generic route
# ---------------------------------------------------------------------------

def _orders(ch1: KrausChannel, ch2: KrausChannel) -> tuple[np.ndarray, np.ndarray]:
    """Products for both causal orders, indexed [j, k] with j over ch2, k over ch1.

    Returns ``(K_j2 K_k1, K_k1 K_j2)`` flattened to (n2 * n1, d, d).
    """
    a, b = ch2.ops, ch1.ops
    first = np.einsum("jab,kbc->jkac", a, b)
    second = np.einsum("kab,jbc->jkac", b, a)
    d = a.shape[-1]
    return first.reshape(-1, d, d), second.reshape(-1, d, d)


def _check_pair(ch1: KrausChannel, ch2: KrausChannel) -> None:
    for ch in (ch1, ch2):
        if not isinstance(ch, KrausChannel):
            raise InvalidInput("switch inputs must be KrausChannel instances")
        if ch.dim != 2:
            raise InvalidInput("switch inputs must be qubit channels")


def switch_kraus(ch1: KrausChannel, ch2: KrausChannel) -> KrausChannel:
    """Kraus operators K_jk = K_j2 K_k1 (x) |0><0| + K_k1 K_j2 (x) |1><1|."""
    _check_pair(ch1, ch2)
    first, second = _orders(ch1, ch2)
    zero = np.zeros_like(first)
    return KrausChannel(block_matrix(first, zero, zero, second))


def s00_generic(ch: KrausChannel, rho, ch2: Optional[KrausChannel] = None) -> np.ndarray:
    """Cascade (1)-(2): sum_jk K_j2 K_k1 rho K_k1^dag K_j2^dag.

    ``rho`` may be a raw array stack (..., 2, 2); it is not validated.
    """
    ch2 = ch if ch2 is None else ch2
    first, _ = _orders(ch, ch2)
    return np.einsum("nab,...bc,ndc->...ad", first, np.asarray(rho, dtype=complex), first.conj())


def s11_generic(ch: KrausChannel, rho, ch2: Optional[KrausChannel] = None) -> np.ndarray:
    ch2 = ch if ch2 is None else ch2
    _, second = _orders(ch, ch2)
    return np.einsum("nab,...bc,ndc->...ad", second, np.asarray(rho, dtype=complex), second.conj())


def s01_generic(ch: KrausChannel, rho, ch2: Optional[KrausChannel] = None) -> np.ndarray:
    """Cross-order term sum_jk K_j2 K_k1 rho K_j2^dag K_k1^dag (unsymmetrized)."""
    ch2 = ch if ch2 is None else ch2
    first, second = _orders(ch, ch2)
    return np.einsum("nab,...bc,ndc->...ad", first, np.asarray(rho, dtype=complex), second.conj())


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + np.conj(np.swapaxes(m, -1, -2)))


def apply_switch_generic(
    ch: KrausChannel,
    rho,
    ctrl,
    ch2: Optional[KrausChannel] = None,
    tol: float = DEFAULT_TOL,
) -> SwitchOutput:
    """Run the switch by summing the 16 joint Kraus operators.

    ``ctrl`` is a :class:`ControlState`, a control density matrix, or a
    bare ``p_c`` for the pure preparation.  ``ch2`` defaults to ``ch``
    (identical channels), in which case the cross-order term is
    Hermitian and is symmetrized.
    """
    identical = ch2 is None or ch2 is ch
    ch2 = ch if ch2 is None else ch2
    _check_pair(ch, ch2)
    rho = density(rho, tol)
    ctrl = _control(ctrl)
    joint_in = kron(rho.mat, ctrl.mat)
    kraus = switch_kraus(ch, ch2)
    joint = np.einsum("nab,bc,ndc->ad", kraus.ops, joint_in, kraus.ops.conj())
    s00 = s00_generic(ch, rho.mat, ch2)
    s01 = s01_generic(ch, rho.mat, ch2)
    tr01 = np.trace(s01)
    if identical:
        if abs(tr01.imag) > IMAG_TRACE_TOL:
            raise ArithmeticError(f"cross-order trace has imaginary part {tr01.imag:.3g}")
        s01 = _hermitize(s01)
    return SwitchOutput(
        joint=DensityOperator(_hermitize(joint), tol),
        s00=s00,
        s01=s01,
        q_c=float(tr01.real),
    )


def joint_state_general(ch: KrausChannel, rho, rho_c, tol: float = DEFAULT_TOL) -> DensityOperator:
    """Joint output assembled blockwise from the cascade and cross-order terms.

    Block (a, b) of the control-major matrix is the probe operator
    multiplied by <a|rho_c|b>: S00, S01 on top and S01^dag, S11 below.
    Valid for any control state, pure or mixed.
    """
    rho = density(rho, tol)
    rc = _control(rho_c).mat
    s00 = s00_generic(ch, rho.mat)
    s11 = s11_generic(ch, rho.mat)
    s01 = _hermitize(s01_generic(ch, rho.mat))
    joint = block_matrix(rc[0, 0] * s00, rc[0, 1] * s01, rc[1, 0] * s01.conj().T, rc[1, 1] * s11)
    return DensityOperator(_hermitize(joint), tol)


# ---------------------------------------------------------------------------
# Closed forms (identical thermal channels, axis e_z)
# ---------------------------------------------------------------------------

def _entries(rho, tol: float = DEFAULT_TOL) -> tuple[float, complex]:
    """(rho00, rho01) of a qubit state, validated without an eigensolve."""
    if isinstance(rho, DensityOperator):
        if rho.dim != 2:
            raise InvalidInput("probe must be a qubit")
        return float(rho.mat[0, 0].real), complex(rho.mat[0, 1])
    m = np.asarray(rho, dtype=complex)
    if m.shape != (2, 2):
        raise InvalidInput(f"probe must be a 2x2 matrix, got shape {m.shape}")
    r00, r11, r01 = m[0, 0], m[1, 1], m[0, 1]
    if max(abs(r00.imag), abs(r11.imag), abs(m[1, 0] - r01.conjugate())) > tol:
        raise InvalidInput("probe is not Hermitian")
    if abs(r00.real + r11.real - 1.0) > tol:
        raise InvalidInput("probe trace is not 1")
    # a 2x2 Hermitian matrix is PSD iff both diagonals and the determinant are
    if min(r00.real, r11.real) < -tol or abs(r01) ** 2 > r00.real * r11.real + tol:
        raise InvalidInput("probe is not positive semidefinite")
    return float(r00.real), complex(r01)


def s00_closed(noise: ThermalNoiseParams, xi: float, rho, axis=E_Z) -> np.ndarray:
    _require_z(axis)
    r00, r01 = _entries(rho)
    p, g = noise.p, noise.gamma
    s2, c2 = phase_sin_cos(2.0 * xi)
    off = (1 - g) * r01 * complex(c2, -s2)
    return np.array(
        [
            [(1 - g) ** 2 * r00 + p * (1 - g) * g + p * g, off],
            [off.conjugate(), (1 - g) ** 2 * (1 - r00) + (1 - p) * (1 - g) * g + (1 - p) * g],
        ],
        dtype=complex,
    )


def s01_closed(noise: ThermalNoiseParams, xi: float, rho, axis=E_Z) -> np.ndarray:
    _require_z(axis)
    r00, r01 = _entries(rho)
    p, g = noise.p, noise.gamma
    _, c = phase_sin_cos(xi)
    s2, c2 = phase_sin_cos(2.0 * xi)
    k = 2 * g * math.sqrt(1 - g) * c
    b00 = k * p * (1 - r00) + (1 - g * (1 - p)) ** 2 * r00
    b11 = k * (1 - p) * r00 + (1 - g * p) ** 2 * (1 - r00)
    b01 = ((1 - g) * complex(c2, -s2) + g * g * (1 - p) * p) * r01
    return np.array([[b00, b01], [b01.conjugate(), b11]], dtype=complex)


def q_factor(noise: ThermalNoiseParams, xi: float, rho00: float, axis=E_Z) -> float:
    """Trace of the cross-order term; independent of the probe coherence."""
    _require_z(axis)
    p, g = noise.p, noise.gamma
    _, c = phase_sin_cos(xi)
    return (
        2 * g * math.sqrt(1 - g) * ((1 - 2 * p) * rho00 + p) * c
        + (2 - g) * g * (2 * p - 1) * rho00
        + (1 - g * p) ** 2
    )


def dq_factor(noise: ThermalNoiseParams, xi: float, rho00: float, axis=E_Z) -> float:
    """Derivative of :func:`q_factor` with respect to the phase."""
    _require_z(axis)
    p, g = noise.p, noise.gamma
    s, _ = phase_sin_cos(xi)
    return -2 * g * math.sqrt(1 - g) * ((1 - 2 * p) * rho00 + p) * s


def joint_state_closed(noise: ThermalNoiseParams, xi: float, rho, p_c: float, axis=E_Z) -> np.ndarray:
    """Control-major 4x4 joint state for a pure control, from the closed forms."""
    s00 = s00_closed(noise, xi, rho, axis)
    s01 = s01_closed(noise, xi, rho, axis)
    w = math.sqrt((1 - p_c) * p_c)
    return block_matrix(p_c * s00, w * s01, w * s01, (1 - p_c) * s00)


def reduced_control(out: SwitchOutput, ctrl) -> DensityOperator:
    """Control-qubit state after discarding the probe.

    The diagonal of the control preparation is unchanged; its coherence is
    multiplied by the factor ``out.q_c``.
    """
    rc = _control(ctrl).mat
    m = np.array(
        [[rc[0, 0], rc[0, 1] * out.q_c], [rc[1, 0] * out.q_c, rc[1, 1]]],
        dtype=complex,
    )
    return DensityOperator(m)


def control_from_joint(joint) -> np.ndarray:
    return partial_trace(np.asarray(joint), keep="control")
