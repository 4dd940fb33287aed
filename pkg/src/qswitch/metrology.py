"""Fisher information for phase estimation with and without the switch."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .channels import (
    E_Z,
    AffineBlochMap,
    ThermalNoiseParams,
    UnitaryParams,
    bloch_affine_of_thermal,
    noisy_unitary_channel,
    rotation_matrix,
)
from .linalg import DEFAULT_TOL, DensityOperator, InvalidInput, density, hermitian_eig, partial_trace
from .switch import SwitchOutput, apply_switch_generic, dq_factor, q_factor

# Below this, 1 - Q^2 (or 1 - |s|^2) is treated as an exact zero.
SINGULAR_EPS = 1e-15
SPECTRAL_EPS = 1e-12
SPECTRAL_STEP = 1e-5
FD_STEP = 1e-6
PROB_TOL = 1e-12
UNDEFINED_PROB = 1e-14


class ConsistencyError(ArithmeticError):
    """A computed probability left [0, 1]: the supplied Q_c is not physical."""


@dataclass(frozen=True)
class FisherReport:
    q_c: float
    dq_c: float
    fq_con: float
    fc_con: float
    p_plus: float
    p_minus: float

    def as_dict(self) -> dict:
        return dict(
            q_c=self.q_c,
            dq_c=self.dq_c,
            fq_con=self.fq_con,
            fc_con=self.fc_con,
            p_plus=self.p_plus,
            p_minus=self.p_minus,
        )


@dataclass(frozen=True)
class StandardProbeConfig:
    """A probe Bloch vector sent once through a noisy rotation.

    ``noise`` is either thermal-noise parameters or any affine Bloch map.
    """

    r: np.ndarray
    u: UnitaryParams
    noise: Union[ThermalNoiseParams, AffineBlochMap]

    def __post_init__(self):
        r = np.array(self.r, dtype=float).reshape(3)
        if np.linalg.norm(r) > 1.0 + DEFAULT_TOL:
            raise InvalidInput(f"probe Bloch vector {r} lies outside the unit ball")
        r.flags.writeable = False
        object.__setattr__(self, "r", r)

    @property
    def affine(self) -> AffineBlochMap:
        if isinstance(self.noise, AffineBlochMap):
            return self.noise
        return bloch_affine_of_thermal(self.noise)


@dataclass(frozen=True)
class PostMeasurement:
    """Probe states conditioned on the Hadamard outcome of the control.

    ``plus``/``minus`` are ``None`` when the outcome probability is below
    1e-14, where the conditional state is undefined.
    """

    plus: Optional[DensityOperator]
    minus: Optional[DensityOperator]
    p_plus: float
    p_minus: float
    unnormalized_plus: np.ndarray
    unnormalized_minus: np.ndarray


def _coherence_weight(p_c: float) -> float:
    if not 0.0 <= p_c <= 1.0:
        raise InvalidInput(f"p_c must lie in [0, 1], got {p_c}")
    return 4.0 * (1.0 - p_c) * p_c


def _ratio(num: float, den: float) -> float:
    # 0/0 points (|Q| -> 1 with a vanishing derivative) take the limit 0
    if num == 0.0 or den <= SINGULAR_EPS:
        return 0.0
    return num / den


def qfi_from_q(p_c: float, q_c: float, dq_c: float) -> float:
    """4 (1-p_c) p_c (dQ)^2 / (1 - Q^2)."""
    w = _coherence_weight(p_c)
    return _ratio(w * dq_c * dq_c, 1.0 - q_c * q_c)


def qfi_control(
    noise: ThermalNoiseParams, xi: float, rho00: float, p_c: float = 0.5, axis=E_Z
) -> float:
    """Quantum Fisher information on the phase carried by the control qubit alone.

    Maximal at ``p_c = 1/2``.  Returns exactly 0 at the degenerate points
    gamma in {0, 1}, xi in {0, pi} and p_c in {0, 1}.
    """
    return qfi_from_q(p_c, q_factor(noise, xi, rho00, axis), dq_factor(noise, xi, rho00, axis))


def cfi_control(p_c: float, q_c: float, dq_c: float) -> float:
    """Classical Fisher information of a Hadamard-basis measurement of the control."""
    w = _coherence_weight(p_c)
    return _ratio(w * dq_c * dq_c, 1.0 - w * q_c * q_c)


def hadamard_probs(p_c: float, q_c: float) -> tuple[float, float]:
    w = math.sqrt((1.0 - p_c) * p_c) if 0.0 <= p_c <= 1.0 else math.nan
    if math.isnan(w):
        raise InvalidInput(f"p_c must lie in [0, 1], got {p_c}")
    p_plus = 0.5 + w * q_c
    p_minus = 0.5 - w * q_c
    for v in (p_plus, p_minus):
        if v < -PROB_TOL or v > 1.0 + PROB_TOL:
            raise ConsistencyError(f"probability {v} outside [0, 1]; |Q_c| = {abs(q_c)} is unphysical")
    return min(max(p_plus, 0.0), 1.0), min(max(p_minus, 0.0), 1.0)


def fisher_report(
    noise: ThermalNoiseParams, xi: float, rho00: float, p_c: float = 0.5, axis=E_Z
) -> FisherReport:
    q = q_factor(noise, xi, rho00, axis)
    dq = dq_factor(noise, xi, rho00, axis)
    p_plus, p_minus = hadamard_probs(p_c, q)
    return FisherReport(
        q_c=q,
        dq_c=dq,
        fq_con=qfi_from_q(p_c, q, dq),
        fc_con=cfi_control(p_c, q, dq),
        p_plus=p_plus,
        p_minus=p_minus,
    )


def qfi_bloch(r, u: UnitaryParams, amap: AffineBlochMap) -> float:
    """QFI on the phase of one pass through ``r -> A R_xi r + c``.

    With ``s = A R r + c`` and ``ds = A (n x R r)``::

        F = (s . ds)^2 / (1 - |s|^2) + |ds|^2

    The first term is dropped for a pure output (|s| = 1), where s . ds
    vanishes as well.
    """
    r = np.asarray(r, dtype=float)
    rot_r = rotation_matrix(u) @ r
    s = amap.A @ rot_r + amap.c
    ds = amap.A @ np.cross(np.asarray(u.axis), rot_r)
    second = float(ds @ ds)
    den = 1.0 - float(s @ s)
    if den <= SINGULAR_EPS:
        return second
    return float(s @ ds) ** 2 / den + second


def qfi_standard(cfg: StandardProbeConfig) -> float:
    return qfi_bloch(cfg.r, cfg.u, cfg.affine)


def finite_difference(f: Callable[[float], float], x: float, h: float = FD_STEP):
    """Central difference (f(x+h) - f(x-h)) / 2h; works for array-valued f."""
    return (f(x + h) - f(x - h)) / (2.0 * h)


def qfi_spectral(
    family: Callable[[float], object],
    xi: float,
    derivative: Optional[Callable[[float], np.ndarray]] = None,
    h: float = SPECTRAL_STEP,
    eps: float = SPECTRAL_EPS,
    tol: float = DEFAULT_TOL,
) -> float:
    """QFI of a state family from the spectral (SLD) formula.

    F = 2 sum_{l,m} |<l| d rho |m>|^2 / (lambda_l + lambda_m), skipping
    pairs whose eigenvalue sum is below ``eps``.  The derivative is taken
    by central differences with step ``h`` unless supplied.
    """

    def member(x):
        return density(family(x), tol).mat

    rho = member(xi)
    if derivative is None:
        drho = finite_difference(member, xi, h)
    else:
        drho = np.asarray(derivative(xi), dtype=complex)
    w, v = hermitian_eig(rho, tol)
    d = v.conj().T @ drho @ v
    lam = w[:, None] + w[None, :]
    keep = lam >= eps
    return float(2.0 * np.sum(np.abs(d[keep]) ** 2 / lam[keep]))


def control_state_family(
    noise: ThermalNoiseParams, rho, p_c: float = 0.5, axis=E_Z
) -> Callable[[float], np.ndarray]:
    """xi -> reduced control state, computed by the generic Kraus route."""
    rho = density(rho)

    def family(xi: float) -> np.ndarray:
        ch = noisy_unitary_channel(noise, UnitaryParams(axis, xi))
        out = apply_switch_generic(ch, rho, p_c)
        return partial_trace(out.joint.mat, keep="control")

    return family


def joint_state_family(
    noise: ThermalNoiseParams, rho, p_c: float = 0.5, axis=E_Z
) -> Callable[[float], np.ndarray]:
    """xi -> 4x4 probe-control output state (generic Kraus route)."""
    rho = density(rho)

    def family(xi: float) -> np.ndarray:
        ch = noisy_unitary_channel(noise, UnitaryParams(axis, xi))
        return apply_switch_generic(ch, rho, p_c).joint.mat

    return family


def post_measurement_states(out: SwitchOutput, p_c: float, tol: float = DEFAULT_TOL) -> PostMeasurement:
    """Probe state left after projecting the control on |+> or |->."""
    w = math.sqrt((1.0 - p_c) * p_c) if 0.0 <= p_c <= 1.0 else math.nan
    if math.isnan(w):
        raise InvalidInput(f"p_c must lie in [0, 1], got {p_c}")
    plus = 0.5 * out.s00 + w * out.s01
    minus = 0.5 * out.s00 - w * out.s01
    p_plus = float(np.trace(plus).real)
    p_minus = float(np.trace(minus).real)

    def normalize(m, prob):
        if prob < UNDEFINED_PROB:
            return None
        return DensityOperator(m / prob, tol)

    return PostMeasurement(
        plus=normalize(plus, p_plus),
        minus=normalize(minus, p_minus),
        p_plus=p_plus,
        p_minus=p_minus,
        unnormalized_plus=plus,
        unnormalized_minus=minus,
    )
