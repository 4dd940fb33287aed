"""Parameter-grid sweeps written as CSV, including the figure presets."""

from __future__ import annotations

import csv
import io
import itertools
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .channels import E_X, E_Z, ThermalNoiseParams, UnitaryParams, p_from_effective_temperature
from .config import RunConfig, parse_axis, parse_complex, parse_real
from .linalg import InvalidInput
from .metrology import StandardProbeConfig, cfi_control, qfi_from_q, qfi_standard
from .switch import dq_factor, q_factor

AXIS_PARAMS = ("p", "T_p", "gamma", "xi", "rho00", "p_c")
FIXED_ONLY = ("axis", "rho01")

# target name -> CSV column
TARGETS = {
    "qfi_control": "fq_con",
    "qfi_standard": "fq_std",
    "q_factor": "q_c",
    "cfi_control": "fc_con",
    # single-pass optimum with the probe along e_x; the 1 - gamma reference curve
    "qfi_standard_opt": "fq_std_opt",
}

FLOAT_FORMAT = ".12g"


def fmt(x: float) -> str:
    return format(float(x), FLOAT_FORMAT)


@dataclass(frozen=True)
class GridAxis:
    name: str
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    @classmethod
    def parse(cls, text: str) -> "GridAxis":
        """Parse ``name:start:stop:count``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise InvalidInput(f"grid axis must be name:start:stop:count, got {text!r}")
        name, start, stop, count = parts
        try:
            n = int(count)
        except ValueError:
            raise InvalidInput(f"grid count must be an integer, got {count!r}") from None
        return cls(name.strip(), parse_real(start), parse_real(stop), n)


@dataclass(frozen=True)
class SweepSpec:
    targets: tuple
    axes: tuple
    fixed: Mapping = field(default_factory=dict)
    output_path: Optional[str] = None

    def validate(self) -> None:
        if not self.targets:
            raise InvalidInput("sweep needs at least one target")
        for t in self.targets:
            if t not in TARGETS:
                raise InvalidInput(f"unknown target {t!r}; expected one of {', '.join(TARGETS)}")
        if not self.axes:
            raise InvalidInput("sweep needs at least one axis")
        names = [a.name for a in self.axes]
        for a in self.axes:
            if a.name not in AXIS_PARAMS:
                raise InvalidInput(f"cannot sweep {a.name!r}; axes must be among {', '.join(AXIS_PARAMS)}")
            if a.count < 2:
                raise InvalidInput(f"axis {a.name} needs at least 2 points")
        if len(set(names)) != len(names):
            raise InvalidInput("an axis is listed twice")
        for k in self.fixed:
            if k not in AXIS_PARAMS + FIXED_ONLY:
                raise InvalidInput(f"unknown fixed parameter {k!r}")
            if k in names:
                raise InvalidInput(f"{k} is both an axis and fixed")
        given = set(names) | set(self.fixed)
        if {"p", "T_p"} <= given:
            raise InvalidInput("give either p or T_p, not both")

    @property
    def columns(self) -> list:
        return [a.name for a in self.axes] + [TARGETS[t] for t in self.targets]

    def grid(self):
        """Parameter points in lexicographic order (first axis outermost)."""
        return itertools.product(*(a.values() for a in self.axes))


def _fixed_defaults(fixed: Mapping) -> dict:
    """Fill every model parameter not swept or fixed from the RunConfig defaults."""
    d = RunConfig(threads=1)
    base = {"gamma": d.gamma, "xi": d.xi, "rho00": d.rho00, "p_c": d.p_c, "axis": d.axis, "rho01": d.rho01}
    out = dict(base)
    for k, v in fixed.items():
        if k == "axis":
            out[k] = parse_axis(v)
        elif k == "rho01":
            out[k] = v if isinstance(v, complex) else parse_complex(v)
        else:
            out[k] = float(v) if isinstance(v, (int, float)) else parse_real(v)
    if "p" not in out and "T_p" not in out:
        out["p"] = d.p
    return out


def evaluate_point(params: Mapping, targets: Sequence[str]) -> list:
    """Evaluate the requested targets at one parameter point."""
    p = p_from_effective_temperature(params["T_p"]) if "T_p" in params else params["p"]
    noise = ThermalNoiseParams(p, params["gamma"])
    xi, rho00, p_c, axis = params["xi"], params["rho00"], params["p_c"], params["axis"]
    row = []
    q = dq = None
    for t in targets:
        if t in ("qfi_control", "cfi_control", "q_factor") and q is None:
            q = q_factor(noise, xi, rho00, axis)
            dq = dq_factor(noise, xi, rho00, axis)
        if t == "qfi_control":
            row.append(qfi_from_q(p_c, q, dq))
        elif t == "cfi_control":
            row.append(cfi_control(p_c, q, dq))
        elif t == "q_factor":
            row.append(q)
        elif t == "qfi_standard":
            rho01 = params["rho01"]
            r = [2 * rho01.real, -2 * rho01.imag, 2 * rho00 - 1]
            row.append(qfi_standard(StandardProbeConfig(r, UnitaryParams(axis, xi), noise)))
        elif t == "qfi_standard_opt":
            row.append(qfi_standard(StandardProbeConfig(E_X, UnitaryParams(E_Z, xi), noise)))
    return row


def run_sweep(spec: SweepSpec, threads: int = 1) -> list:
    """All rows (axis values followed by target values), in grid order."""
    spec.validate()
    fixed = _fixed_defaults(spec.fixed)
    names = [a.name for a in spec.axes]
    points = list(spec.grid())

    def work(chunk):
        out = []
        for values in chunk:
            params = dict(fixed)
            params.update(zip(names, (float(v) for v in values)))
            out.append(list(values) + evaluate_point(params, spec.targets))
        return out

    size = max(1, math.ceil(len(points) / (4 * max(threads, 1))))
    chunks = [points[i : i + size] for i in range(0, len(points), size)]
    if threads <= 1 or len(chunks) == 1:
        results = [work(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            # map keeps submission order, so output is independent of completion order
            results = list(pool.map(work, chunks))
    return [row for chunk in results for row in chunk]


def render_csv(columns: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the target directory and rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


# ---------------------------------------------------------------------------
# Figure presets
# ---------------------------------------------------------------------------

SURFACE_POINTS = 51
CURVE_POINTS = 101
FIGURE_PHASE = math.pi / 4


def _surface(rho00: float) -> SweepSpec:
    return SweepSpec(
        targets=("qfi_control",),
        axes=(GridAxis("T_p", 0.0, 1.0, SURFACE_POINTS), GridAxis("gamma", 0.0, 1.0, SURFACE_POINTS)),
        fixed={"rho00": rho00, "xi": FIGURE_PHASE, "p_c": 0.5},
    )


PRESETS = {
    # probe |0><0|, aligned with the rotation axis
    "fig3": lambda: _surface(1.0),
    # probe |1><1|
    "fig4": lambda: _surface(0.0),
    # fully depolarized probe
    "fig5": lambda: _surface(0.5),
    "fig6": lambda: SweepSpec(
        targets=("qfi_control", "qfi_standard_opt"),
        axes=(GridAxis("p", 1.0, 0.5, 6), GridAxis("gamma", 0.0, 1.0, CURVE_POINTS)),
        fixed={"rho00": 0.0, "xi": FIGURE_PHASE, "p_c": 0.5},
    ),
    "fig7": lambda: SweepSpec(
        targets=("qfi_control",),
        axes=(GridAxis("p", 1.0, 0.5, 3), GridAxis("rho00", 0.0, 1.0, CURVE_POINTS)),
        fixed={"gamma": 0.5, "xi": FIGURE_PHASE, "p_c": 0.5},
    ),
}


def preset(name: str) -> SweepSpec:
    try:
        return PRESETS[name]()
    except KeyError:
        raise InvalidInput(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}") from None
