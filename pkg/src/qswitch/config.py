"""Run configuration: a flat ``key = value`` file merged with flag overrides."""

from __future__ import annotations

import ast
import math
import operator
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from .channels import E_X, E_Y, E_Z, ThermalNoiseParams, UnitaryParams, p_from_effective_temperature
from .linalg import DEFAULT_TOL, InvalidInput, qubit_state

KEYS = ("p", "T_p", "gamma", "xi", "axis", "rho00", "rho01", "p_c", "tol", "threads")
ALIASES = {"tp": "T_p", "t_p": "T_p", "pc": "p_c", "theta": "xi"}

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def parse_real(text: str) -> float:
    """Parse a real number, allowing ``pi`` and + - * / (e.g. ``3*pi/4``)."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](ev(node.operand))
        raise ValueError

    try:
        value = ev(ast.parse(str(text).strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError, TypeError):
        raise InvalidInput(f"cannot parse number {text!r}") from None
    if not math.isfinite(value):
        raise InvalidInput(f"non-finite number {text!r}")
    return value


def parse_complex(text: str) -> complex:
    try:
        z = complex(str(text).replace(" ", ""))
    except ValueError:
        raise InvalidInput(f"cannot parse complex number {text!r}") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidInput(f"non-finite number {text!r}")
    return z


def parse_axis(text) -> tuple:
    if isinstance(text, (tuple, list)):
        parts = list(text)
    else:
        named = {"x": E_X, "y": E_Y, "z": E_Z}
        t = str(text).strip().lower()
        if t in named:
            return named[t]
        parts = [s for s in t.replace(";", ",").split(",") if s.strip()]
    if len(parts) != 3:
        raise InvalidInput(f"axis needs three components, got {text!r}")
    return tuple(parse_real(s) for s in parts)


def read_config_file(path) -> dict:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read config file {path}: {exc.strerror}") from None
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInput(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = normalize_key(key)
        if key in out:
            raise InvalidInput(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def normalize_key(key: str) -> str:
    k = key.strip()
    k = ALIASES.get(k.lower(), k)
    if k not in KEYS:
        raise InvalidInput(f"unknown configuration key {key!r}; expected one of {', '.join(KEYS)}")
    return k


def merge(file_values: Mapping, overrides: Mapping) -> dict:
    """Flags win; a flag-given p or T_p also displaces the other from the file."""
    base = dict(file_values)
    over = {k: v for k, v in overrides.items() if v is not None}
    if "p" in over or "T_p" in over:
        base.pop("p", None)
        base.pop("T_p", None)
    base.update(over)
    return base


@dataclass(frozen=True)
class RunConfig:
    p: float = 1.0
    gamma: float = 0.5
    xi: float = math.pi / 4
    axis: tuple = E_Z
    rho00: float = 0.0
    rho01: complex = 0j
    p_c: float = 0.5
    tol: float = DEFAULT_TOL
    threads: int = field(default_factory=lambda: os.cpu_count() or 1)

    @property
    def t_p(self) -> float:
        return 2.0 * (1.0 - self.p)

    @property
    def noise(self) -> ThermalNoiseParams:
        return ThermalNoiseParams(self.p, self.gamma)

    @property
    def unitary(self) -> UnitaryParams:
        return UnitaryParams(self.axis, self.xi)

    @property
    def probe(self):
        return qubit_state(self.rho00, self.rho01, self.tol)

    @classmethod
    def from_mapping(cls, values: Mapping) -> "RunConfig":
        """Build and fully validate a config from raw (string or numeric) values."""
        v = {normalize_key(k): x for k, x in values.items() if x is not None}
        if "p" in v and "T_p" in v:
            raise InvalidInput("give either p or T_p, not both")
        kw = {}
        if "T_p" in v:
            kw["p"] = p_from_effective_temperature(_real(v["T_p"]))
        elif "p" in v:
            kw["p"] = _real(v["p"])
        for key in ("gamma", "xi", "rho00", "p_c", "tol"):
            if key in v:
                kw[key] = _real(v[key])
        if "axis" in v:
            kw["axis"] = parse_axis(v["axis"])
        if "rho01" in v:
            kw["rho01"] = v["rho01"] if isinstance(v["rho01"], complex) else parse_complex(v["rho01"])
        if "threads" in v:
            try:
                kw["threads"] = int(v["threads"])
            except ValueError:
                raise InvalidInput(f"threads must be an integer, got {v['threads']!r}") from None
        cfg = cls(**kw)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not 0.0 <= self.p_c <= 1.0:
            raise InvalidInput(f"p_c must lie in [0, 1], got {self.p_c}")
        if not 0.0 <= self.rho00 <= 1.0:
            raise InvalidInput(f"rho00 must lie in [0, 1], got {self.rho00}")
        if not self.tol > 0:
            raise InvalidInput(f"tol must be positive, got {self.tol}")
        if self.threads < 1:
            raise InvalidInput(f"threads must be >= 1, got {self.threads}")
        # constructing these runs their own range checks
        _ = (self.noise, self.unitary, self.probe)


def _real(x) -> float:
    return float(x) if isinstance(x, (int, float)) else parse_real(x)


def load(config_path: Optional[str], overrides: Mapping) -> RunConfig:
    file_values = read_config_file(config_path) if config_path else {}
    return RunConfig.from_mapping(merge(file_values, overrides))
