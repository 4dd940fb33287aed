"""Invariant suite run by ``qswitch validate``.

Each check returns the worst observed deviation next to its tolerance.
Grids are the default sizes; the whole suite runs single-threaded.
"""

from __future__ import annotations

import itertools
import math
import tempfile
import time
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import channels as chn
from . import linalg as la
from . import metrology as met
from . import switch as sw
from . import sweep

SEED = 20220922


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tol: float
    seconds: float = 0.0


def _rng():
    return np.random.default_rng(SEED)


def _herm(m):
    return np.conj(np.swapaxes(m, -1, -2))


def random_hermitian(rng, n, d):
    x = rng.normal(size=(n, d, d)) + 1j * rng.normal(size=(n, d, d))
    return 0.5 * (x + _herm(x))


def random_density(rng, n, d):
    g = rng.normal(size=(n, d, d)) + 1j * rng.normal(size=(n, d, d))
    m = g @ _herm(g)
    return m / np.trace(m, axis1=-2, axis2=-1)[..., None, None]


def random_ball(rng, n):
    """Uniform samples from the closed unit ball."""
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * rng.uniform(size=(n, 1)) ** (1 / 3)


def random_axis(rng):
    v = rng.normal(size=3)
    return chn.as_axis(v)


def state_defect(m) -> float:
    """Worst violation of the density-operator conditions over a stack."""
    herm = la.hermitian_defect(m)
    tr = float(np.max(np.abs(np.trace(m, axis1=-2, axis2=-1) - 1.0)))
    neg = float(np.max(-la.eigvalsh(m, tol=np.inf)[..., 0], initial=0.0))
    return max(herm, tr, max(neg, 0.0))


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------

P_GRID = np.linspace(0.0, 1.0, 21)
G_GRID = np.linspace(0.0, 1.0, 21)
XI_GRID = np.arange(16) * (2 * math.pi / 16)
R00_GRID = np.linspace(0.0, 1.0, 11)
PC_VALUES = (0.0, 0.25, 0.5, 0.75, 1.0)


def _noise(p, g):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", chn.UnphysicalTemperatureWarning)
        return chn.ThermalNoiseParams(float(p), float(g))


def _probe_stack(rng):
    """Probe states for each rho00 in the grid with a random admissible coherence."""
    r00 = R00_GRID
    radius = np.sqrt(r00 * (1 - r00)) * rng.uniform(size=r00.size)
    rho01 = radius * np.exp(1j * rng.uniform(0, 2 * np.pi, size=r00.size))
    rho = np.empty((r00.size, 2, 2), dtype=complex)
    rho[:, 0, 0] = r00
    rho[:, 1, 1] = 1 - r00
    rho[:, 0, 1] = rho01
    rho[:, 1, 0] = rho01.conj()
    return rho


def switch_grid():
    """Yield (noise, xi, channel, rho stack, s00, s01) over the (p, gamma, xi) grid."""
    rng = _rng()
    for p, g, xi in itertools.product(P_GRID, G_GRID, XI_GRID):
        noise = _noise(p, g)
        ch = chn.noisy_unitary_channel(noise, chn.UnitaryParams(chn.E_Z, xi))
        rho = _probe_stack(rng)
        yield noise, float(xi), ch, rho, sw.s00_generic(ch, rho), sw.s01_generic(ch, rho)


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

def check_eig():
    rng = _rng()
    worst = 0.0
    for d in (2, 4):
        h = random_hermitian(rng, 10_000, d)
        w, v = la.hermitian_eig(h)
        recon = v @ (w[..., None] * _herm(v))
        worst = max(worst, float(np.max(np.abs(recon - h))))
        worst = max(worst, float(np.max(np.abs(_herm(v) @ v - np.eye(d)))))
    return worst, 1e-12


def check_partial_trace():
    rng = _rng()
    rho = random_density(rng, 10_000, 4)
    worst = max(state_defect(la.partial_trace(rho, k)) for k in ("probe", "control"))
    return worst, 1e-10


def check_bloch_roundtrip():
    rng = _rng()
    worst = 0.0
    for r in random_ball(rng, 10_000):
        back = la.bloch_from_density(la.density_from_bloch(r))
        worst = max(worst, float(np.max(np.abs(back - r))))
    return worst, 1e-14


def check_completeness():
    rng = _rng()
    worst = 0.0
    for p, g in itertools.product(P_GRID, G_GRID):
        noise = _noise(p, g)
        worst = max(worst, chn.completeness_defect(chn.thermal_kraus(noise).ops))
        u = chn.UnitaryParams(random_axis(rng), rng.uniform(0, 2 * np.pi))
        worst = max(worst, chn.completeness_defect(chn.noisy_unitary_channel(noise, u).ops))
    return worst, 1e-10


def check_channel_outputs():
    rng = _rng()
    n = 10_000
    rho = random_density(rng, n, 2)
    outs = np.empty_like(rho)
    for i in range(n):
        noise = _noise(rng.uniform(), rng.uniform())
        u = chn.UnitaryParams(random_axis(rng), rng.uniform(0, 2 * np.pi))
        outs[i] = chn.apply_kraus(chn.noisy_unitary_channel(noise, u).ops, rho[i])
    return state_defect(outs), 1e-10


def check_bloch_commutation():
    rng = _rng()
    worst = 0.0
    for r in random_ball(rng, 1_000):
        noise = _noise(rng.uniform(), rng.uniform())
        u = chn.UnitaryParams(random_axis(rng), rng.uniform(0, 2 * np.pi))
        via_bloch = la.density_from_bloch(chn.noisy_unitary_affine(noise, u)(r)).mat
        via_kraus = chn.apply_channel(chn.noisy_unitary_channel(noise, u), la.density_from_bloch(r)).mat
        worst = max(worst, float(np.max(np.abs(via_bloch - via_kraus))))
    return worst, 1e-12


def check_temperature_monotone():
    p = np.linspace(0.5, 1.0, 100)
    tp = [chn.effective_temperature(x) for x in p]
    kt = np.linspace(0.0, 50.0, 100)
    pk = [chn.p_from_temperature(1.0, x) for x in kt]
    # worst positive step against the expected (decreasing) direction
    worst = max(float(np.max(np.diff(tp))), float(np.max(np.diff(pk))))
    return max(worst, 0.0), 0.0


def check_closed_forms():
    worst_q = worst_im = worst_s = 0.0
    for noise, xi, _, rho, s00, s01 in switch_grid():
        tr = np.trace(s01, axis1=-2, axis2=-1)
        q = np.array([sw.q_factor(noise, xi, r) for r in rho[:, 0, 0].real])
        worst_q = max(worst_q, float(np.max(np.abs(q - tr.real))))
        worst_im = max(worst_im, float(np.max(np.abs(tr.imag))))
        for i in range(rho.shape[0]):
            c00 = sw.s00_closed(noise, xi, rho[i])
            c01 = sw.s01_closed(noise, xi, rho[i])
            worst_s = max(worst_s, float(np.max(np.abs(c00 - s00[i]))), float(np.max(np.abs(c01 - s01[i]))))
    # the imaginary residue has its own, tighter bound
    return max(worst_q, worst_s, worst_im * 1e2), 1e-10


def check_joint_states():
    worst = 0.0
    blocks = []
    for _, _, _, _, s00, s01 in switch_grid():
        s01h = 0.5 * (s01 + _herm(s01))
        for pc in PC_VALUES:
            w = math.sqrt((1 - pc) * pc)
            blocks.append(la.block_matrix(pc * s00, w * s01h, w * _herm(s01h), (1 - pc) * s00))
        if len(blocks) >= 4000:
            worst = max(worst, state_defect(np.concatenate(blocks)))
            blocks = []
    if blocks:
        worst = max(worst, state_defect(np.concatenate(blocks)))
    return worst, 1e-10


def check_probe_reduction():
    rng = _rng()
    worst = 0.0
    for _ in range(500):
        noise = _noise(rng.uniform(), rng.uniform())
        u = chn.UnitaryParams(random_axis(rng), rng.uniform(0, 2 * np.pi))
        rho = random_density(rng, 1, 2)[0]
        pc = float(rng.uniform())
        out = sw.apply_switch_generic(chn.noisy_unitary_channel(noise, u), rho, pc)
        worst = max(worst, float(np.max(np.abs(la.partial_trace(out.joint.mat, "probe") - out.s00))))
    return worst, 1e-12


def check_q_bound():
    worst = -np.inf
    for p, g, xi, r in itertools.product(P_GRID, G_GRID, XI_GRID, R00_GRID):
        worst = max(worst, abs(sw.q_factor(_noise(p, g), xi, r)) - 1.0)
    # excess of |Q_c| over one; rounding can leave a few ulps
    return max(worst, 0.0), 1e-12


def check_dq_fd():
    worst = 0.0
    for p, g, xi, r in itertools.product(P_GRID, G_GRID, XI_GRID, R00_GRID):
        noise = _noise(p, g)
        fd = met.finite_difference(lambda x: sw.q_factor(noise, x, r), xi, 1e-6)
        worst = max(worst, abs(fd - sw.dq_factor(noise, xi, r)))
    return worst, 1e-7


FISHER_P = np.linspace(0.0, 1.0, 11)
FISHER_G = np.linspace(0.0, 1.0, 11)
FISHER_XI = np.arange(8) * (math.pi / 4)


def check_pc_optimality():
    pcs = np.round(np.arange(0.05, 0.951, 0.05), 10)
    worst = 0.0
    for p, g, xi, r in itertools.product(FISHER_P, FISHER_G, FISHER_XI, R00_GRID):
        noise = _noise(p, g)
        vals = [met.qfi_control(noise, xi, r, pc) for pc in pcs]
        at_half = met.qfi_control(noise, xi, r, 0.5)
        worst = max(worst, max(vals) - at_half)
    return worst, 0.0


def check_hadamard_optimality():
    worst = 0.0
    for p, g, xi, r in itertools.product(P_GRID, G_GRID, XI_GRID, R00_GRID):
        noise = _noise(p, g)
        q, dq = sw.q_factor(noise, xi, r), sw.dq_factor(noise, xi, r)
        worst = max(worst, abs(met.cfi_control(0.5, q, dq) - met.qfi_control(noise, xi, r, 0.5)))
    return worst, 1e-12


def check_spectral():
    worst = 0.0
    for p, g, xi, r in itertools.product(
        np.linspace(0, 1, 9), np.linspace(0, 1, 9), FISHER_XI, (0.0, 0.5, 1.0)
    ):
        noise = _noise(p, g)
        fam = met.control_state_family(noise, la.qubit_state(r), 0.5)
        worst = max(worst, abs(met.qfi_spectral(fam, xi) - met.qfi_control(noise, xi, r)))
    return worst, 1e-6


def check_standard_optimum():
    worst = 0.0
    for g, xi, p in itertools.product(np.linspace(0, 1, 11), FISHER_XI, (0.5, 0.75, 1.0)):
        cfg = met.StandardProbeConfig(chn.E_X, chn.UnitaryParams(chn.E_Z, xi), _noise(p, g))
        worst = max(worst, abs(met.qfi_standard(cfg) - (1 - g)))
    return worst, 1e-9


def check_degenerate_zeros():
    worst = 0.0
    for p, g, xi, r in itertools.product(FISHER_P, FISHER_G, FISHER_XI, R00_GRID):
        noise = _noise(p, g)
        cases = []
        if g in (0.0, 1.0) or xi in (0.0, math.pi):
            cases.append(met.qfi_control(noise, xi, r))
        cases += [met.qfi_control(noise, xi, r, 0.0), met.qfi_control(noise, xi, r, 1.0)]
        worst = max(worst, max(abs(c) for c in cases))
    return worst, 0.0


def check_rho00_monotone():
    worst = 0.0
    r = np.linspace(0, 1, 101)
    for p, g in itertools.product(np.linspace(0.5, 1.0, 11), np.linspace(0.05, 0.95, 19)):
        noise = _noise(p, g)
        f = np.array([met.qfi_control(noise, math.pi / 4, x) for x in r])
        worst = max(worst, float(np.max(np.diff(f))))
    return max(worst, 0.0), 0.0


def check_depolarized_operability():
    # F_con must stay positive for the depolarized probe; F_std must vanish.
    worst = 0.0
    for p, g, xi in itertools.product(
        np.linspace(0.5, 1.0, 11), np.linspace(0.05, 0.95, 19), np.linspace(0.1, math.pi - 0.1, 9)
    ):
        noise = _noise(p, g)
        f_con = met.qfi_control(noise, xi, 0.5)
        f_std = met.qfi_standard(met.StandardProbeConfig(np.zeros(3), chn.UnitaryParams(chn.E_Z, xi), noise))
        worst = max(worst, abs(f_std), 1.0 if f_con <= 0 else 0.0)
    return worst, 0.0


def check_csv_determinism():
    spec = sweep.preset("fig7")
    with tempfile.TemporaryDirectory() as d:
        paths = [Path(d) / f"run{i}.csv" for i in range(2)]
        for i, path in enumerate(paths):
            rows = sweep.run_sweep(spec, threads=1 + 3 * i)
            sweep.write_atomic(path, sweep.render_csv(spec.columns, rows))
        same = paths[0].read_bytes() == paths[1].read_bytes()
    return (0.0 if same else 1.0), 0.0


CHECKS: dict[str, Callable[[], tuple]] = {
    "linalg.eig_reconstruction": check_eig,
    "linalg.partial_trace_valid": check_partial_trace,
    "linalg.bloch_roundtrip": check_bloch_roundtrip,
    "channels.completeness": check_completeness,
    "channels.outputs_valid": check_channel_outputs,
    "channels.bloch_commutation": check_bloch_commutation,
    "channels.temperature_monotone": check_temperature_monotone,
    "switch.closed_forms_vs_generic": check_closed_forms,
    "switch.joint_state_valid": check_joint_states,
    "switch.probe_reduction": check_probe_reduction,
    "switch.q_bound": check_q_bound,
    "switch.dq_finite_difference": check_dq_fd,
    "metrology.pc_optimality": check_pc_optimality,
    "metrology.hadamard_optimality": check_hadamard_optimality,
    "metrology.spectral_equivalence": check_spectral,
    "metrology.standard_optimum": check_standard_optimum,
    "metrology.degenerate_zeros": check_degenerate_zeros,
    "metrology.rho00_monotone": check_rho00_monotone,
    "metrology.depolarized_operability": check_depolarized_operability,
    "cli.csv_determinism": check_csv_determinism,
}


def run_all(tol_scale: float = 1.0, only=None) -> list[CheckResult]:
    """Run every check.  ``tol_scale`` multiplies each tolerance; a negative
    scale makes every check fail, which exercises the failure path."""
    results = []
    for name, fn in CHECKS.items():
        if only and not any(s in name for s in only):
            continue
        t0 = time.perf_counter()
        worst, tol = fn()
        tol = tol * tol_scale if tol_scale >= 0 else -1.0
        results.append(CheckResult(name, bool(worst <= tol), float(worst), tol, time.perf_counter() - t0))
    return results
