"""Small dense complex linear algebra for qubit and qubit-pair operators.

Matrices are plain ``numpy`` arrays of shape ``(d, d)`` with ``d`` in
{2, 3, 4}.  Most routines also accept a stack ``(..., d, d)``.

Joint probe-control operators use the *control-major* ordering::

    joint index = 2 * control + probe

so a 4x4 joint matrix is a 2x2 grid of 2x2 probe blocks indexed by the
control basis.  ``to_probe_major`` converts to the other convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

DEFAULT_TOL = 1e-10
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])

for _m in (I2, I4, SIGMA_X, SIGMA_Y, SIGMA_Z, PAULIS):
    _m.flags.writeable = False


class InvalidInput(ValueError):
    """Raised when an argument violates an operation's precondition."""


def as_cmatrix(m, dims=(2, 3, 4)) -> np.ndarray:
    """Return ``m`` as a finite complex square matrix (or stack of them)."""
    a = np.asarray(m, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise InvalidInput(f"expected square matrix, got shape {a.shape}")
    if dims is not None and a.shape[-1] not in dims:
        raise InvalidInput(f"matrix dimension {a.shape[-1]} not in {tuple(dims)}")
    if not np.all(np.isfinite(a)):
        raise InvalidInput("matrix has non-finite entries")
    return a


def _check_same(a, b):
    a, b = as_cmatrix(a), as_cmatrix(b)
    if a.shape[-1] != b.shape[-1]:
        raise InvalidInput(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    return a, b


def add(a, b) -> np.ndarray:
    a, b = _check_same(a, b)
    return a + b


def multiply(a, b) -> np.ndarray:
    a, b = _check_same(a, b)
    return a @ b


def scale(z: complex, a) -> np.ndarray:
    return complex(z) * as_cmatrix(a)


def adjoint(a) -> np.ndarray:
    return np.conj(np.swapaxes(as_cmatrix(a), -1, -2))


def trace(a) -> complex:
    return complex(np.trace(as_cmatrix(a)))


def hermitian_defect(a) -> float:
    """Max-abs entry of ``a - a^dagger``."""
    a = np.asarray(a)
    return float(np.max(np.abs(a - np.conj(np.swapaxes(a, -1, -2))), initial=0.0))


# ---------------------------------------------------------------------------
# Eigensolver
# ---------------------------------------------------------------------------

def _offdiag_norm(a: np.ndarray) -> np.ndarray:
    d = a.shape[-1]
    mask = ~np.eye(d, dtype=bool)
    return np.sqrt(np.sum(np.abs(a[..., mask]) ** 2, axis=-1))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """One complex Jacobi rotation zeroing ``a[..., p, q]`` in place."""
    apq = a[..., p, q]
    mag = np.abs(apq)
    live = mag > 0.0
    safe_mag = np.where(live, mag, 1.0)
    # real divisions: complex division by a subnormal magnitude can overflow
    phase = np.where(live, apq.real / safe_mag + 1j * (apq.imag / safe_mag), 1.0)  # e^{i phi}
    with np.errstate(over="ignore"):
        # theta may saturate to +-inf for a negligible a_pq; t then becomes 0
        theta = (a[..., q, q].real - a[..., p, p].real) / (2.0 * safe_mag)
        sign = np.where(theta >= 0.0, 1.0, -1.0)
        t = sign / (np.abs(theta) + np.hypot(theta, 1.0))
    t = np.where(live, t, 0.0)
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    # G = Phi J with Phi = diag(1, e^{-i phi}) on (p, q):
    #   G_pp = c, G_pq = s, G_qp = -s e^{-i phi}, G_qq = c e^{-i phi}
    ph = np.conj(phase)
    g_pp, g_pq = c, s
    g_qp, g_qq = -s * ph, c * ph

    def right(m):
        col_p = m[..., :, p].copy()
        col_q = m[..., :, q]
        m[..., :, p] = col_p * g_pp[..., None] + col_q * g_qp[..., None]
        m[..., :, q] = col_p * g_pq[..., None] + col_q * g_qq[..., None]

    right(a)
    row_p = a[..., p, :].copy()
    row_q = a[..., q, :]
    a[..., p, :] = np.conj(g_pp)[..., None] * row_p + np.conj(g_qp)[..., None] * row_q
    a[..., q, :] = np.conj(g_pq)[..., None] * row_p + np.conj(g_qq)[..., None] * row_q
    a[..., p, q] = 0.0
    a[..., q, p] = 0.0
    right(v)


def hermitian_eig(m, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    m : array_like, shape (..., d, d)
        Hermitian matrix or stack of Hermitian matrices.
    tol : float
        Admissible Hermiticity defect ``max|m - m^dagger|``.

    Returns
    -------
    eigenvalues : ndarray, shape (..., d)
        Real eigenvalues in ascending order.
    eigenvectors : ndarray, shape (..., d, d)
        Orthonormal eigenvectors stored as columns, matching ``eigenvalues``.

    Notes
    -----
    Sweeps stop once the off-diagonal Frobenius mass falls below
    ``1e-14`` (relative to the matrix scale when it exceeds one), after at
    most 100 sweeps.
    """
    a = as_cmatrix(m)
    if hermitian_defect(a) > tol:
        raise InvalidInput(f"matrix is not Hermitian within {tol:g}")
    a = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    d = a.shape[-1]
    v = np.broadcast_to(np.eye(d, dtype=complex), a.shape).copy()
    scale_ = np.maximum(np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1))), 1.0)
    pairs = [(p, q) for p in range(d - 1) for q in range(p + 1, d)]
    for _ in range(JACOBI_MAX_SWEEPS):
        if np.all(_offdiag_norm(a) < JACOBI_TOL * scale_):
            break
        for p, q in pairs:
            _rotate(a, v, p, q)
    w = np.real(np.diagonal(a, axis1=-2, axis2=-1))
    order = np.argsort(w, axis=-1)
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[..., None, :], axis=-1)
    return w, v


def eigvalsh(m, tol: float = DEFAULT_TOL) -> np.ndarray:
    return hermitian_eig(m, tol)[0]


# ---------------------------------------------------------------------------
# Bipartite probe-control structure
# ---------------------------------------------------------------------------

Subsystem = Literal["probe", "control"]


def kron(probe_op, control_op) -> np.ndarray:
    """Tensor product ``probe_op (x) control_op`` in control-major ordering.

    The probe factor is written first, as in ``K (x) |0_c><0_c|``; the
    entry for (probe i, control a ; probe j, control b) lands at
    ``[2a + i, 2b + j]``.
    """
    a = as_cmatrix(probe_op, dims=(2,))
    b = as_cmatrix(control_op, dims=(2,))
    return np.kron(b, a)


def _blocks(joint: np.ndarray) -> np.ndarray:
    """View a (..., 4, 4) joint matrix as (..., c, p, c', p')."""
    return joint.reshape(joint.shape[:-2] + (2, 2, 2, 2))


def partial_trace(joint, keep: Subsystem) -> np.ndarray:
    j = _blocks(as_cmatrix(joint, dims=(4,)))
    if keep == "probe":
        return np.einsum("...cpcq->...pq", j)
    if keep == "control":
        return np.einsum("...apbp->...ab", j)
    raise InvalidInput(f"keep must be 'probe' or 'control', got {keep!r}")


def to_probe_major(joint) -> np.ndarray:
    """Reorder a control-major joint matrix to probe-major (index 2*probe + control)."""
    j = _blocks(as_cmatrix(joint, dims=(4,)))
    return np.swapaxes(np.swapaxes(j, -4, -3), -2, -1).reshape(j.shape[:-4] + (4, 4))


def from_probe_major(joint) -> np.ndarray:
    # the permutation is an involution
    return to_probe_major(joint)


def block_matrix(b00, b01, b10, b11) -> np.ndarray:
    """Assemble a control-major 4x4 matrix from its four probe blocks."""
    top = np.concatenate([b00, b01], axis=-1)
    bottom = np.concatenate([b10, b11], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityOperator:
    """A validated density matrix (Hermitian, unit trace, PSD within ``tol``)."""

    mat: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        m = as_cmatrix(self.mat).copy()
        if m.ndim != 2:
            raise InvalidInput("DensityOperator holds a single matrix")
        if hermitian_defect(m) > self.tol:
            raise InvalidInput("density operator is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > self.tol:
            raise InvalidInput(f"density operator has trace {tr:.6g}")
        if eigvalsh(m, self.tol)[0] < -self.tol:
            raise InvalidInput("density operator is not positive semidefinite")
        m.flags.writeable = False
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def bloch(self) -> np.ndarray:
        return bloch_from_density(self)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mat, dtype=dtype)


def density(x, tol: float = DEFAULT_TOL) -> DensityOperator:
    """Coerce ``x`` to a DensityOperator, validating raw arrays."""
    if isinstance(x, DensityOperator):
        return x
    return DensityOperator(np.asarray(x), tol)


def pure_state(psi) -> DensityOperator:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return DensityOperator(np.outer(psi, psi.conj()))


def bloch_from_density(rho) -> np.ndarray:
    """Bloch vector r with rho = (I + r . sigma) / 2."""
    m = density(rho).mat
    if m.shape != (2, 2):
        raise InvalidInput("Bloch vectors exist for qubit states only")
    return np.array([2.0 * m[0, 1].real, -2.0 * m[0, 1].imag, (m[0, 0] - m[1, 1]).real])


def density_from_bloch(r, tol: float = DEFAULT_TOL) -> DensityOperator:
    r = np.asarray(r, dtype=float)
    if r.shape != (3,) or not np.all(np.isfinite(r)):
        raise InvalidInput(f"Bloch vector must be a finite 3-vector, got {r!r}")
    if np.linalg.norm(r) > 1.0 + tol:
        raise InvalidInput(f"Bloch vector norm {np.linalg.norm(r):.6g} exceeds 1")
    return DensityOperator(0.5 * (I2 + np.einsum("i,ijk->jk", r, PAULIS)), tol)


def qubit_state(rho00: float, rho01: complex = 0.0, tol: float = DEFAULT_TOL) -> DensityOperator:
    """Qubit density operator from its (0,0) and (0,1) entries."""
    rho01 = complex(rho01)
    m = np.array([[rho00, rho01], [rho01.conjugate(), 1.0 - rho00]], dtype=complex)
    return DensityOperator(m, tol)
