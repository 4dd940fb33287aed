"""Command-line front end: ``point``, ``sweep``, ``joint-dump`` and ``validate``.

Exit codes: 0 success, 1 validation failure, 2 invalid input, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
import time
import warnings
from typing import Optional, Sequence

import numpy as np

from . import linalg as la
from . import sweep as sw
from . import validation
from .config import load, normalize_key, parse_real, read_config_file
from .channels import noisy_unitary_channel
from .metrology import ConsistencyError, fisher_report
from .switch import apply_switch_generic, joint_state_closed

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INPUT = 2
EXIT_IO = 3

POINT_KEYS = ("q_c", "dq_c", "fq_con", "fc_con", "p_plus", "p_minus")
PARAM_FLAGS = ("p", "T_p", "gamma", "xi", "axis", "rho00", "rho01", "p_c")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _global_flags(parser, default):
    parser.add_argument("--config", metavar="PATH", default=default, help="key = value configuration file")
    parser.add_argument("--out", metavar="PATH", default=default, help="output file")
    parser.add_argument("--threads", metavar="N", type=int, default=default, help="worker threads")
    parser.add_argument("--tol", metavar="X", default=default, help="validation tolerance")


def _param_flags(parser):
    for name in PARAM_FLAGS:
        parser.add_argument(f"--{name}", metavar="X", default=None)


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    common = _Parser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)

    parser = _Parser(prog="qswitch", description="Quantum-switch phase estimation under thermal noise.")
    _global_flags(parser, None)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("point", parents=[common], help="evaluate one parameter point")
    _param_flags(p)

    s = sub.add_parser("sweep", parents=[common], help="grid sweep written as CSV")
    s.add_argument("--preset", choices=sorted(sw.PRESETS))
    s.add_argument("--target", action="append", choices=sorted(sw.TARGETS), default=None)
    s.add_argument("--grid", action="append", metavar="NAME:START:STOP:COUNT", default=None)
    s.add_argument("--set", action="append", metavar="KEY=VALUE", default=None, dest="fixed")

    j = sub.add_parser("joint-dump", parents=[common], help="print the probe-control output state")
    _param_flags(j)

    v = sub.add_parser("validate", parents=[common], help="run the invariant suite")
    v.add_argument("--tol-scale", type=float, default=1.0, help="multiply every check tolerance (self-test hook)")
    v.add_argument("--only", action="append", metavar="SUBSTR", help="run checks whose name contains SUBSTR")
    return parser


def _overrides(args) -> dict:
    out = {name: getattr(args, name, None) for name in PARAM_FLAGS}
    out["tol"] = args.tol
    out["threads"] = args.threads
    return out


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        sw.write_atomic(path, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_point(args) -> int:
    cfg = load(args.config, _overrides(args))
    report = fisher_report(cfg.noise, cfg.xi, cfg.rho00, cfg.p_c, cfg.axis).as_dict()
    if args.out:
        sw.write_atomic(args.out, sw.render_csv(POINT_KEYS, [[report[k] for k in POINT_KEYS]]))
    for k in POINT_KEYS:
        print(f"{k}={sw.fmt(report[k])}")
    return EXIT_OK


def _parse_fixed(items) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise la.InvalidInput(f"--set expects KEY=VALUE, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        key = normalize_key(key)
        if key in ("tol", "threads"):
            raise la.InvalidInput(f"{key} is not a model parameter")
        out[key] = value
    return out


def sweep_spec(args) -> sw.SweepSpec:
    if args.preset:
        base = sw.preset(args.preset)
        targets = tuple(args.target) if args.target else base.targets
        axes = tuple(sw.GridAxis.parse(g) for g in args.grid) if args.grid else base.axes
        fixed = dict(base.fixed)
        fixed.update(_parse_fixed(args.fixed))
        for a in axes:
            fixed.pop(a.name, None)
    else:
        if not args.target or not args.grid:
            raise la.InvalidInput("sweep needs --preset, or --target and --grid")
        targets = tuple(args.target)
        axes = tuple(sw.GridAxis.parse(g) for g in args.grid)
        fixed = _parse_fixed(args.fixed)
    # config file values fill parameters that are neither swept nor fixed
    if args.config:
        names = {a.name for a in axes}
        for k, v in read_config_file(args.config).items():
            if k in ("tol", "threads") or k in names or k in fixed:
                continue
            if k in ("p", "T_p") and ({"p", "T_p"} & (names | set(fixed))):
                continue
            fixed[k] = v
    spec = sw.SweepSpec(targets=targets, axes=axes, fixed=fixed, output_path=args.out)
    spec.validate()
    return spec


def cmd_sweep(args) -> int:
    spec = sweep_spec(args)
    threads = args.threads if args.threads is not None else load(args.config, {}).threads
    if threads < 1:
        raise la.InvalidInput(f"threads must be >= 1, got {threads}")
    rows = sw.run_sweep(spec, threads)
    _emit(sw.render_csv(spec.columns, rows), spec.output_path)
    return EXIT_OK


def _matrix_lines(m: np.ndarray) -> list:
    return [" ".join(f"{sw.fmt(z.real)},{sw.fmt(z.imag)}" for z in row) for row in m]


def cmd_joint_dump(args) -> int:
    cfg = load(args.config, _overrides(args))
    if cfg.unitary.is_z:
        joint = joint_state_closed(cfg.noise, cfg.xi, cfg.probe, cfg.p_c)
    else:
        ch = noisy_unitary_channel(cfg.noise, cfg.unitary)
        joint = apply_switch_generic(ch, cfg.probe, cfg.p_c, tol=cfg.tol).joint.mat
    state = la.DensityOperator(0.5 * (joint + joint.conj().T), cfg.tol)
    evals = la.eigvalsh(state.mat, cfg.tol)
    lines = [
        "# joint probe-control state, control-major order: index = 2*control + probe",
        "# basis: |0c 0p>, |0c 1p>, |1c 0p>, |1c 1p>; entries as re,im",
        "joint:",
        *_matrix_lines(state.mat),
        "eigenvalues: " + " ".join(sw.fmt(x) for x in evals),
        "probe:",
        *_matrix_lines(la.partial_trace(state.mat, "probe")),
        "control:",
        *_matrix_lines(la.partial_trace(state.mat, "control")),
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.tol is not None:
        raise la.InvalidInput("validate uses fixed per-check tolerances; use --tol-scale")
    t0 = time.perf_counter()
    results = validation.run_all(args.tol_scale, args.only)
    lines = [
        f"{'PASS' if r.passed else 'FAIL'} {r.name} worst={r.worst:.3g} tol={r.tol:.3g} ({r.seconds:.2f}s)"
        for r in results
    ]
    failed = sum(not r.passed for r in results)
    lines.append(f"{len(results) - failed}/{len(results)} passed in {time.perf_counter() - t0:.1f}s")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if failed == 0 and results else EXIT_VALIDATION


COMMANDS = {"point": cmd_point, "sweep": cmd_sweep, "joint-dump": cmd_joint_dump, "validate": cmd_validate}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.tol is not None:
            parse_real(args.tol)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"qswitch: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (la.InvalidInput, ConsistencyError) as exc:
        print(f"qswitch: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"qswitch: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
