"""Command-line interface.

Subcommands: ``tms``, ``thermal``, ``cho``, ``converge`` and ``verify``.
Exit codes: 0 success, 1 verification failure, 2 invalid arguments,
3 domain error (unstable normal mode).

Relative ``--out`` paths are resolved against ``$BOSENT_OUTPUT_DIR`` when
that variable is set.
"""
import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import paper
from .entanglement import (
    Base,
    entanglement_entropy,
    entropy_gaussian_closed,
    entropy_tms_closed,
    entropy_tv_closed,
)
from .exceptions import InstabilityError
from .states import (
    BOLTZMANN_J_PER_K,
    DEFAULT_OMEGA_ENERGY,
    OscillatorPair,
    ThermalParams,
    cho_ground_state_numeric,
    normal_mode_params,
    thermal_vacuum_state,
    tms_state,
)
from .sweeps import (
    MAX_CHO_CUTOFF,
    SweepSpec,
    SweepTable,
    convergence_report,
    discrepancy_report,
    sweep_cho,
    sweep_tms,
    sweep_tv,
)
from .verify import run_checks

OUTPUT_DIR_ENV = "BOSENT_OUTPUT_DIR"

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3


# -- serialization ----------------------------------------------------------

def format_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _json_value(v: Any) -> Any:
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if hasattr(v, "item"):
        return _json_value(v.item())
    return v


def table_to_csv(table: SweepTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def table_to_json(table: SweepTable) -> str:
    doc = {
        "metadata": {k: _json_value(v) for k, v in table.metadata.items()},
        "columns": list(table.columns),
        "rows": [[_json_value(v) for v in row] for row in table.rows],
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def render(table: SweepTable, fmt: str) -> str:
    return table_to_json(table) if fmt == "json" else table_to_csv(table)


def resolve_output(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def write_atomic(path: Path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_table(table: SweepTable, args: argparse.Namespace) -> None:
    fmt = _output_format(args)
    text = render(table, fmt)
    if args.out:
        write_atomic(resolve_output(args.out), text)
    else:
        sys.stdout.write(text)


def _output_format(args: argparse.Namespace) -> str:
    if args.format:
        return args.format
    if args.out and args.out.lower().endswith(".json"):
        return "json"
    return "csv"


def _print_pairs(pairs: Sequence[tuple]) -> None:
    width = max(len(k) for k, _ in pairs)
    for key, text in pairs:
        print(f"{key:<{width}}  {text}")


def _ent(v: float) -> str:
    return f"{v:.10f}"


def _err(v: float) -> str:
    return f"{v:.3e}"


def _point_table(columns: Sequence[str], row: tuple, metadata: Dict[str, Any]) -> SweepTable:
    return SweepTable(tuple(columns), [row], metadata)


# -- commands ---------------------------------------------------------------

def cmd_tms(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    base = Base.parse(args.base)
    if args.sweep:
        try:
            spec = SweepSpec.parse_range("lambda", args.sweep, cutoff=args.cutoff, base=base)
        except ValueError as exc:
            parser.error(f"--sweep: {exc}")
        if spec.start < 0:
            parser.error("--sweep: squeezing parameter must be >= 0")
        table = sweep_tms(spec, workers=args.workers)
        emit_table(table, args)
        if table.flagged_rows:
            print(f"warning: {len(table.flagged_rows)} rows flagged for truncation", file=sys.stderr)
        return EXIT_OK

    lam = args.lam
    if lam < 0 or not math.isfinite(lam):
        parser.error(f"--lambda must be a finite number >= 0, got {lam}")
    state = tms_state(lam, args.cutoff, warn=False)
    closed = entropy_tms_closed(lam, base).value
    numeric = entanglement_entropy(state, base).value
    diff = abs(closed - numeric)
    _print_pairs(
        [
            ("lambda", format_value(float(lam))),
            ("closed_form", _ent(closed)),
            ("numeric", _ent(numeric)),
            ("abs_difference", _err(diff)),
            ("truncation_weight", _err(state.truncation_weight)),
            ("cutoff", str(args.cutoff)),
            ("base", base.value),
        ]
    )
    for note in state.warnings:
        print(f"warning: {note}", file=sys.stderr)
    if args.out:
        emit_table(
            _point_table(
                ("lambda", "closed_form", "numeric", "abs_difference", "truncation_weight", "cutoff", "flagged"),
                (float(lam), closed, numeric, diff, state.truncation_weight, args.cutoff, state.flagged),
                {"system": "tms", "cutoff": args.cutoff, "base": base.value},
            ),
            args,
        )
    return EXIT_OK


def cmd_thermal(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    base = Base.parse(args.base)
    if args.omega <= 0:
        parser.error(f"--omega must be > 0, got {args.omega}")
    if args.kb <= 0:
        parser.error(f"--kb must be > 0, got {args.kb}")
    if args.sweep:
        try:
            spec = SweepSpec.parse_range("temperature", args.sweep, cutoff=args.cutoff, base=base)
        except ValueError as exc:
            parser.error(f"--sweep: {exc}")
        if spec.start <= 0:
            parser.error("--sweep: temperatures must be > 0")
        table = sweep_tv(spec, args.omega, args.kb, workers=args.workers)
        emit_table(table, args)
        if table.flagged_rows:
            print(f"warning: {len(table.flagged_rows)} rows hit the cutoff cap", file=sys.stderr)
        return EXIT_OK

    if args.beta_omega is not None:
        if not args.beta_omega > 0:
            parser.error(f"--beta-omega must be > 0, got {args.beta_omega}")
        bw = args.beta_omega
        temp = math.nan
    else:
        if not args.temp > 0:
            parser.error(f"--temp must be > 0 K, got {args.temp}")
        temp = args.temp
        bw = ThermalParams(args.omega, temp, args.kb).beta_omega
    state = thermal_vacuum_state(bw, args.cutoff, warn=False)
    closed = entropy_tv_closed(bw, base).value
    numeric = entanglement_entropy(state, base).value
    diff = abs(closed - numeric)
    pairs = [("temperature", format_value(temp))] if math.isfinite(temp) else []
    pairs += [
        ("beta_omega", format_value(bw)),
        ("closed_form", _ent(closed)),
        ("numeric", _ent(numeric)),
        ("abs_difference", _err(diff)),
        ("truncation_weight", _err(state.truncation_weight)),
        ("cutoff", str(args.cutoff)),
        ("base", base.value),
    ]
    _print_pairs(pairs)
    for note in state.warnings:
        print(f"warning: {note}", file=sys.stderr)
    if args.out:
        emit_table(
            _point_table(
                ("temperature", "beta_omega", "closed_form", "numeric", "abs_difference", "truncation_weight", "cutoff", "flagged"),
                (temp, bw, closed, numeric, diff, state.truncation_weight, args.cutoff, state.flagged),
                {"system": "thermal", "cutoff": args.cutoff, "base": base.value,
                 "omega_energy": args.omega, "boltzmann": args.kb},
            ),
            args,
        )
    return EXIT_OK


def cmd_cho(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    base = Base.parse(args.base)
    if args.cutoff > MAX_CHO_CUTOFF:
        parser.error(f"--cutoff is limited to {MAX_CHO_CUTOFF} levels per mode for cho")
    if args.mass <= 0 or args.omega <= 0:
        parser.error("--mass and --omega must be > 0")

    if args.paper_sweep:
        try:
            spec = SweepSpec.parse_range("r1", args.paper_sweep, cutoff=args.cutoff, base=base)
        except ValueError as exc:
            parser.error(f"--paper-sweep: {exc}")
        table = sweep_cho(spec)
        emit_table(table, args)
        print(f"argmax r1 = {table.metadata['argmax_r1']:.2f}", file=sys.stderr)
        return EXIT_OK

    if args.paper_r1 is not None:
        r1 = args.paper_r1
        if not math.isfinite(r1):
            parser.error("--paper-r1 must be finite")
        value = paper.entropy_cho_paper(r1, base).value
        trace = paper.truncated_trace_paper(r1)
        _print_pairs(
            [
                ("r1", format_value(float(r1))),
                ("printed_entropy", _ent(value)),
                ("printed_trace", _ent(trace)),
                ("base", base.value),
            ]
        )
        if args.out:
            emit_table(
                _point_table(("r1", "paper_entropy", "paper_trace", "flagged"), (float(r1), value, trace, False),
                             {"system": "cho-paper", "base": base.value}),
                args,
            )
        return EXIT_OK

    if args.sweep:
        try:
            spec = SweepSpec.parse_range("delta", args.sweep, cutoff=args.cutoff, base=base)
        except ValueError as exc:
            parser.error(f"--sweep: {exc}")
        table = sweep_cho(spec, OscillatorPair(args.mass, args.omega, 0.0), workers=args.workers)
        emit_table(table, args)
        if table.flagged_rows:
            print(f"warning: {len(table.flagged_rows)} unstable rows written as nan and flagged", file=sys.stderr)
        return EXIT_OK

    if args.delta is None:
        parser.error("cho needs one of --delta, --sweep, --paper-r1 or --paper-sweep")
    o = OscillatorPair(args.mass, args.omega, args.delta)
    try:
        modes = normal_mode_params(o)
    except InstabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    if args.report_discrepancy:
        report = discrepancy_report(o, args.cutoff, base)
        _print_pairs([(k, format_value(v)) for k, v in report.items()])
        if args.out:
            write_atomic(resolve_output(args.out), json.dumps(report, indent=2) + "\n")
        return EXIT_OK

    state = cho_ground_state_numeric(o, args.cutoff)
    gauss = entropy_gaussian_closed(modes.nu, base).value
    numeric = entanglement_entropy(state, base).value
    diff = abs(gauss - numeric)
    _print_pairs(
        [
            ("delta", format_value(float(args.delta))),
            ("nu", f"{modes.nu:.10f}"),
            ("gaussian", _ent(gauss)),
            ("numeric", _ent(numeric)),
            ("abs_difference", _err(diff)),
            ("ground_energy", f"{state.energy:.10f}"),
            ("zero_point_energy", f"{modes.zero_point_energy:.10f}"),
            ("cutoff", str(args.cutoff)),
            ("base", base.value),
        ]
    )
    if args.out:
        emit_table(
            _point_table(
                ("delta", "nu", "gaussian", "numeric", "abs_difference", "ground_energy", "zero_point_energy", "cutoff", "flagged"),
                (float(args.delta), modes.nu, gauss, numeric, diff, state.energy, modes.zero_point_energy, args.cutoff, False),
                {"system": "cho", "cutoff": args.cutoff, "base": base.value, "mass": args.mass, "omega": args.omega},
            ),
            args,
        )
    return EXIT_OK


def cmd_converge(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    try:
        cutoffs = [int(v) for v in args.cutoffs.split(",")]
    except ValueError:
        parser.error(f"--cutoffs must be comma-separated integers, got {args.cutoffs!r}")
    params: Dict[str, float] = {}
    if args.system == "tms":
        params["lambda"] = args.lam if args.lam is not None else 1.0
    elif args.system == "thermal":
        params["beta_omega"] = args.beta_omega if args.beta_omega is not None else 1.0
    else:
        params.update(delta=args.delta if args.delta is not None else 0.5, mass=args.mass, omega=args.omega)
        try:
            normal_mode_params(OscillatorPair(args.mass, args.omega, params["delta"]))
        except InstabilityError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DOMAIN
    try:
        report = convergence_report(args.system, params, cutoffs, args.base)
    except ValueError as exc:
        parser.error(str(exc))
    emit_table(report.as_table(), args)
    print(f"final delta = {report.final_delta:.3e}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    results = run_checks(fast=args.fast, seed=args.seed)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} of {len(results)} checks failed: " + "; ".join(failed))
        return EXIT_VERIFY_FAILED
    print(f"all {len(results)} checks passed")
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 2:
        raise argparse.ArgumentTypeError(f"cutoff must be >= 2, got {value}")
    return value


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--base", choices=["e", "2"], default="e", help="logarithm base (default: e)")
    p.add_argument("--out", help="write the table to this file (relative to $BOSENT_OUTPUT_DIR if set)")
    p.add_argument("--format", choices=["csv", "json"], help="output format (default: from --out suffix, else csv)")
    p.add_argument("--workers", type=int, default=1, help="threads for sweep rows (default: 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bosent", description="Entanglement entropy of two-mode bosonic states."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tms", help="two-mode squeezed vacuum")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--lambda", dest="lam", type=float, help="squeezing parameter")
    g.add_argument("--sweep", metavar="START:STOP:STEPS")
    p.add_argument("--cutoff", type=_positive_int, default=128, help="levels per mode (default: 128)")
    _add_output(p)
    p.set_defaults(func=cmd_tms)

    p = sub.add_parser("thermal", help="thermal vacuum of a free boson")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--temp", type=float, help="temperature in K")
    g.add_argument("--beta-omega", type=float, help="dimensionless omega/(k_B T)")
    g.add_argument("--sweep", metavar="START:STOP:STEPS", help="temperature sweep in K")
    p.add_argument("--omega", type=float, default=DEFAULT_OMEGA_ENERGY, help=f"energy quantum in J (default: {DEFAULT_OMEGA_ENERGY:g})")
    p.add_argument("--kb", type=float, default=BOLTZMANN_J_PER_K, help=f"Boltzmann constant in J/K (default: {BOLTZMANN_J_PER_K:g})")
    p.add_argument("--cutoff", type=_positive_int, default=64, help="levels per mode (default: 64)")
    _add_output(p)
    p.set_defaults(func=cmd_thermal)

    p = sub.add_parser("cho", help="two coupled harmonic oscillators")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--delta", type=float, help="coupling constant")
    g.add_argument("--sweep", metavar="START:STOP:STEPS", help="coupling sweep")
    g.add_argument("--paper-r1", type=float, help="printed -q log q formula at this r1")
    g.add_argument("--paper-sweep", metavar="START:STOP:STEPS", help="printed formula over an r1 grid")
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--cutoff", type=_positive_int, default=32, help="levels per mode (default: 32, max 64)")
    p.add_argument("--report-discrepancy", action="store_true",
                   help="compare the printed formulas with both oracles at --delta")
    _add_output(p)
    p.set_defaults(func=cmd_cho)

    p = sub.add_parser("converge", help="entropy against cutoff")
    p.add_argument("--system", choices=["tms", "thermal", "cho"], required=True)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--beta-omega", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--cutoffs", default="16,32,64", help="ascending comma-separated cutoffs")
    _add_output(p)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("verify", help="run the self-verification suite")
    p.add_argument("--fast", action="store_true", help="halved cutoffs, tolerances x100")
    p.add_argument("--seed", type=int, default=1234, help="seed for random test matrices")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "cho" and args.report_discrepancy and args.delta is None:
        parser.error("--report-discrepancy needs --delta")
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
