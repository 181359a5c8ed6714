"""Command-line front end: reproducible experiments emitting CSV or JSON.

Subcommands
-----------
threshold    threshold flag and output amplitude over a grid of kappa*L/delta
curve        conversion curve eps^2(kappa*L/delta) with the third-order column
profiles     analytic field amplitudes along the cell
phase-check  relative phase and stretched coordinate along the analytic solution
bvp          general boundary-value solve by shooting

Options may also come from a JSON file given with ``--config``; its keys are
the long option names with dashes replaced by underscores.  Flags on the
command line win over the file, which wins over the built-in defaults.

Exit codes: 0 success, 1 invalid input, 2 below threshold or trivial
solution, 3 solver non-convergence, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .analytic import (
    THRESHOLD,
    AnalyticSolution,
    is_above_threshold,
    phase_consistency_check,
    solve_output_amplitude,
    third_order_epsilon,
)
from .errors import ConvergenceError, EllipticDomainError
from .propagation import STEPS_PER_UNIT, TRAJECTORY_HEADER
from .shooting import BoundaryConditions, solve_bvp
from .state import MediumParams

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_TRIVIAL = 2
EXIT_NO_CONVERGENCE = 3
EXIT_IO = 4

SIGNIFICANT_DIGITS = 12

COMMON_DEFAULTS = {
    "output": "-",
    "format": "csv",
    "steps_per_unit": STEPS_PER_UNIT,
    "tol": 1e-9,
}

DEFAULTS = {
    "threshold": {"start": 1.0, "stop": 2.0, "step": 0.1, "kl": None},
    "curve": {"start": 0.5, "stop": 3 * THRESHOLD, "n_points": 50},
    "profiles": {"epsilon": None, "kl": None, "n_points": 101},
    "phase-check": {"epsilon": 0.98, "n_steps": 1000, "offset": 1e-6, "ac_stark": True},
    "bvp": {
        "kl": 3 * THRESHOLD,
        "omega10": 1.0,
        "omega20": 1.0,
        "phase1": 0.0,
        "phase2": 0.0,
        "delta_k": 0.0,
        "ac_stark": False,
        "max_iter": 50,
        "stride": 10,
        "report": None,
    },
}


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # usage errors must not collide with the informative exit code 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def fmt(value) -> str:
    """Locale-independent fixed-width rendering of one cell."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    x = float(value)
    # drop the sign of zero so conjugation noise does not change the bytes
    return f"{x + 0.0 if x == 0 else x:.{SIGNIFICANT_DIGITS}g}"


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        return float(fmt(x)) if math.isfinite(x) else None
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def render(columns, rows, fmt_name: str, summary: dict | None = None) -> str:
    if fmt_name == "json":
        doc = {"columns": list(columns), "rows": [[_json_value(v) for v in r] for r in rows]}
        if summary is not None:
            doc["summary"] = _json_value(summary)
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([fmt(v) for v in r])
    return buf.getvalue()


def write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_IO) from exc


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}", EXIT_IO) from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"config {path} is not valid JSON: {exc}", EXIT_INVALID) from exc
    if not isinstance(data, dict):
        raise CliError("config file must hold a JSON object", EXIT_INVALID)
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and explicit flags (in increasing priority)."""
    merged = dict(COMMON_DEFAULTS)
    merged.update(DEFAULTS[args.command])
    config = load_config(args.config)
    unknown = set(config) - set(merged)
    if unknown:
        raise CliError(f"unknown config keys: {', '.join(sorted(unknown))}", EXIT_INVALID)
    merged.update(config)
    for key in merged:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if merged["format"] not in ("csv", "json"):
        raise CliError("format must be csv or json", EXIT_INVALID)
    if not merged["tol"] > 0 or not int(merged["steps_per_unit"]) > 0:
        raise CliError("tolerances and step counts must be positive", EXIT_INVALID)
    return merged


def _grid(start: float, stop: float, step: float) -> np.ndarray:
    if not step > 0 or stop < start:
        raise CliError("need start <= stop and step > 0", EXIT_INVALID)
    n = int(math.floor((stop - start) / step + 1e-9))
    return start + step * np.arange(n + 1)


def cmd_threshold(cfg: dict):
    kls = [float(cfg["kl"])] if cfg["kl"] is not None else _grid(cfg["start"], cfg["stop"],
                                                                cfg["step"])
    rows = []
    for kl in kls:
        sol = solve_output_amplitude(kl) if kl > 0 else None
        eps = sol.epsilon if sol else 0.0
        rows.append((kl, is_above_threshold(kl), eps, sol.epsilon_squared if sol else 0.0))
    text = render(("kL_over_delta", "above_threshold", "epsilon", "epsilon_squared"), rows,
                  cfg["format"])
    code = EXIT_OK if any(r[1] for r in rows) else EXIT_TRIVIAL
    if code == EXIT_TRIVIAL:
        print("below threshold: only the trivial solution exists", file=sys.stderr)
    return text, code


def cmd_curve(cfg: dict):
    start, stop, n = float(cfg["start"]), float(cfg["stop"]), int(cfg["n_points"])
    if not (0 < start <= stop) or n < 1:
        raise CliError("curve needs 0 < start <= stop and n_points >= 1", EXIT_INVALID)
    rows = []
    for kl in np.linspace(start, stop, n):
        sol = solve_output_amplitude(kl)
        third = third_order_epsilon(kl) if kl >= THRESHOLD else 0.0
        if sol is None:
            rows.append((kl, 0.0, 0.0, third))
        else:
            rows.append((kl, sol.epsilon, sol.epsilon_squared, third))
    cols = ("kL_over_delta", "epsilon", "epsilon_squared", "third_order_epsilon")
    return render(cols, rows, cfg["format"]), EXIT_OK


def _analytic_for(cfg: dict) -> AnalyticSolution:
    if cfg["epsilon"] is not None and cfg["kl"] is not None:
        raise CliError("give either --epsilon or --kl, not both", EXIT_INVALID)
    if cfg["epsilon"] is not None:
        eps = float(cfg["epsilon"])
        if not 0 < eps < 1:
            raise CliError("epsilon must lie in (0, 1)", EXIT_INVALID)
        return AnalyticSolution.from_epsilon(eps)
    if cfg["kl"] is None:
        raise CliError("profiles needs --epsilon or --kl", EXIT_INVALID)
    kl = float(cfg["kl"])
    sol = solve_output_amplitude(kl) if kl > 0 else None
    if sol is None:
        raise CliError(
            f"kappa*L/delta = {kl:g} is not above the threshold pi/2; "
            "no non-trivial profile exists",
            EXIT_TRIVIAL,
        )
    if sol.gap == 0.0:
        raise CliError("conversion is complete to double precision; profile undefined",
                       EXIT_INVALID)
    return sol


def cmd_profiles(cfg: dict):
    sol = _analytic_for(cfg)
    n = int(cfg["n_points"])
    if n < 2:
        raise CliError("n_points must be at least 2", EXIT_INVALID)
    z = np.linspace(0.0, 1.0, n)
    rows = list(zip(z, *sol.amplitudes(z)))
    return render(("z_over_L", "theta", "e1", "e2", "a1", "a2"), rows, cfg["format"]), EXIT_OK


def cmd_phase_check(cfg: dict):
    eps = float(cfg["epsilon"])
    if not 0 < eps < 1:
        raise CliError("epsilon must lie in (0, 1)", EXIT_INVALID)
    check = phase_consistency_check(eps, n_steps=int(cfg["n_steps"]),
                                    offset=float(cfg["offset"]), ac_stark=bool(cfg["ac_stark"]))
    rows = list(zip(check.z_over_l, check.xi_over_l, check.psi))
    summary = {"epsilon": eps, "max_deviation": check.max_deviation,
               "ac_stark": bool(cfg["ac_stark"])}
    print(f"max |xi - z|/L = {fmt(check.max_deviation)}", file=sys.stderr)
    return render(("z_over_L", "xi_over_L", "psi"), rows, cfg["format"], summary), EXIT_OK


def cmd_bvp(cfg: dict):
    params = MediumParams.from_kl(float(cfg["kl"]), delta_k=float(cfg["delta_k"]))
    bc = BoundaryConditions(omega10=float(cfg["omega10"]), omega20=float(cfg["omega20"]),
                            phase1=float(cfg["phase1"]), phase2=float(cfg["phase2"]))
    stride = int(cfg["stride"])
    if stride < 1:
        raise CliError("stride must be a positive integer", EXIT_INVALID)
    try:
        sol = solve_bvp(bc, params, ac_stark=bool(cfg["ac_stark"]),
                        steps_per_unit=int(cfg["steps_per_unit"]), tol=float(cfg["tol"]),
                        max_iter=int(cfg["max_iter"]), raise_on_failure=True)
    except ConvergenceError as exc:
        report = {"converged": False, "best_residual": exc.best_residual, "seeds": exc.seeds}
        _emit_report(cfg, report)
        raise CliError(str(exc), EXIT_NO_CONVERGENCE) from exc
    traj = sol.trajectory
    rows = list(traj.rows())
    keep = rows[::stride]
    if (len(rows) - 1) % stride:
        keep.append(rows[-1])
    text = render(TRAJECTORY_HEADER.split(","), keep, cfg["format"])
    _emit_report(cfg, sol.report.to_json_dict())
    if sol.trivial:
        print("only the trivial solution was found", file=sys.stderr)
        return text, EXIT_TRIVIAL
    return text, EXIT_OK


def _emit_report(cfg: dict, report: dict) -> None:
    text = json.dumps(_json_value(report), indent=2, sort_keys=True) + "\n"
    if cfg["report"] is None:
        sys.stderr.write(text)
    else:
        write_text(cfg["report"], text)


COMMANDS = {
    "threshold": cmd_threshold,
    "curve": cmd_curve,
    "profiles": cmd_profiles,
    "phase-check": cmd_phase_check,
    "bvp": cmd_bvp,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--config", help="JSON file with option values (flags take precedence)")
    g.add_argument("-o", "--output", help="output file, '-' for stdout (default: -)")
    g.add_argument("--format", choices=("csv", "json"), help="output format (default: csv)")
    g.add_argument("--steps-per-unit", type=int,
                   help=f"RK4 steps per unit of kappa*z/delta (default: {STEPS_PER_UNIT})")
    g.add_argument("--tol", type=float, help="shooting residual tolerance (default: 1e-9)")

    parser = _Parser(prog="mirrorless-fwm", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("threshold", parents=[common], help="threshold flags over a grid")
    p.add_argument("--start", type=float, help="first kappa*L/delta (default: 1.0)")
    p.add_argument("--stop", type=float, help="last kappa*L/delta (default: 2.0)")
    p.add_argument("--step", type=float, help="grid spacing (default: 0.1)")
    p.add_argument("--kl", type=float, help="evaluate a single kappa*L/delta instead")

    p = sub.add_parser("curve", parents=[common], help="conversion curve")
    p.add_argument("--start", type=float, help="first kappa*L/delta (default: 0.5)")
    p.add_argument("--stop", type=float, help="last kappa*L/delta (default: 3 pi/2)")
    p.add_argument("--n-points", type=int, help="number of samples (default: 50)")

    p = sub.add_parser("profiles", parents=[common], help="analytic field profiles")
    p.add_argument("--epsilon", type=float, help="output amplitude in (0, 1)")
    p.add_argument("--kl", type=float, help="kappa*L/delta above threshold")
    p.add_argument("--n-points", type=int, help="samples along the cell (default: 101)")

    p = sub.add_parser("phase-check", parents=[common],
                       help="relative-phase consistency along the analytic solution")
    p.add_argument("--epsilon", type=float, help="output amplitude in (0, 1) (default: 0.98)")
    p.add_argument("--n-steps", type=int, help="output samples (default: 1000)")
    p.add_argument("--offset", type=float, help="start offset as a fraction of L (default: 1e-6)")
    p.add_argument("--ac-stark", action=argparse.BooleanOptionalAction,
                   help="include the self-phase terms (default: on)")

    p = sub.add_parser("bvp", parents=[common], help="shooting solve of the boundary-value problem")
    p.add_argument("--kl", type=float, help="kappa*L/delta (default: 3 pi/2)")
    p.add_argument("--omega10", type=float, help="pump 1 input at z=0, units of a10 (default: 1)")
    p.add_argument("--omega20", type=float, help="pump 2 input at z=L, units of a10 (default: 1)")
    p.add_argument("--phase1", type=float, help="pump 1 input phase [rad] (default: 0)")
    p.add_argument("--phase2", type=float, help="pump 2 input phase [rad] (default: 0)")
    p.add_argument("--delta-k", type=float, help="phase mismatch times delta/kappa (default: 0)")
    p.add_argument("--ac-stark", action=argparse.BooleanOptionalAction,
                   help="include the self-phase terms (default: off)")
    p.add_argument("--max-iter", type=int, help="Newton iterations per seed (default: 50)")
    p.add_argument("--stride", type=int, help="write every n-th integration step (default: 10)")
    p.add_argument("--report", help="file for the solver report JSON (default: stderr)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        text, code = COMMANDS[args.command](cfg)
        write_text(cfg["output"], text)
        return code
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (ValueError, EllipticDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
