"""Command-line interface.

Subcommands map one-to-one onto library operations::

    qrac classical --n 3
    qrac quantum --n 2 --starts 100 --seed 7 --out optimum.json
    qrac entropy --n 3 --t 6.928203
    qrac curve --n 3 --t-min 6.0 --t-max 6.928203 --steps 25 --out fig3.csv
    qrac threshold --n 3
    qrac verify-qrac3 --out qrac3.json
    qrac simulate --strategy qrac3 --rounds 1000000 --seed 1 --out run.json
    qrac certify --transcript run.json --confidence 0.95

Exit status: 0 success, 1 infeasible or insufficient-statistics result,
2 usage error. ``QRAC_LOG`` (error/info/debug) sets stderr verbosity.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

from .bloch import DomainError
from .certifier import CertifierConfig, EntropyPoint, entropy_curve, guessing_probability, positivity_threshold
from .classical import classical_max_T
from .protocol3 import build_protocol3, format_report, verify_protocol3
from .seesaw import SeesawConfig, seesaw_optimize
from .simulator import InsufficientStatistics, certify_rate, estimate_witness, load_transcript, run_protocol
from .strategy import load_strategy

logger = logging.getLogger("qracrng")

CSV_COLUMNS = ("n", "t_target", "p_guess", "h_min", "feasible", "constraint_residual")
EXIT_OK, EXIT_RESULT, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def write_atomic(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return f"{x:.9f}"


def curve_csv(points: list[EntropyPoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for p in points:
        writer.writerow([
            p.n, _fmt(p.t_target), _fmt(p.p_guess), _fmt(p.h_min),
            "true" if p.feasible else "false", _fmt(p.constraint_residual),
        ])
    return buf.getvalue()


def _load_config_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    known = {f.name for f in dataclasses.fields(SeesawConfig)} | {
        f.name for f in dataclasses.fields(CertifierConfig)
    }
    unknown = sorted(set(data) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return data


def _build_config(cls, args):
    file_values = _load_config_file(args.config) if args.config else {}
    names = {f.name for f in dataclasses.fields(cls)}
    values = {k: v for k, v in file_values.items() if k in names}
    for flag in ("starts", "seed"):
        if getattr(args, flag, None) is not None:
            values[flag] = getattr(args, flag)
    if "penalty_schedule" in values:
        values["penalty_schedule"] = tuple(values["penalty_schedule"])
    return cls(**values)


def _uint64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _emit(args, text: str, payload: str | None = None) -> None:
    print(text)
    if args.out and payload is not None:
        write_atomic(args.out, payload)


def cmd_classical(args) -> int:
    res = classical_max_T(args.n)
    _emit(args, f"T_classical = {res.t_max:g}", json.dumps({
        "n": res.n, "t_max": res.t_max,
        "encoder": list(res.witness_strategy.encoder),
        "decoders": [list(d) for d in res.witness_strategy.decoders],
    }, indent=2) + "\n")
    return EXIT_OK


def cmd_quantum(args) -> int:
    res = seesaw_optimize(args.n, _build_config(SeesawConfig, args))
    _emit(args, f"T_quantum = {res.t_quantum:.12f}", res.strategy.to_json())
    return EXIT_OK


def _dump_witness(directory, point: EntropyPoint) -> None:
    if directory and point.witness_strategy is not None:
        Path(directory).mkdir(parents=True, exist_ok=True)
        name = f"witness_n{point.n}_t{point.t_target:.9f}.json"
        write_atomic(Path(directory) / name, point.witness_strategy.to_json())


def cmd_entropy(args) -> int:
    point = guessing_probability(args.n, args.t, _build_config(CertifierConfig, args))
    _dump_witness(args.witness_dir, point)
    if not point.feasible:
        _emit(args, f"t = {args.t} is not reachable by any qubit strategy", curve_csv([point]))
        return EXIT_RESULT
    _emit(args, f"p_guess = {point.p_guess:.9f}\nH_min = {point.h_min:.9f}", curve_csv([point]))
    return EXIT_OK


def cmd_curve(args) -> int:
    points = entropy_curve(args.n, args.t_min, args.t_max, args.steps,
                           _build_config(CertifierConfig, args))
    for p in points:
        _dump_witness(args.witness_dir, p)
    _emit(args, curve_csv(points).rstrip("\n"), curve_csv(points))
    return EXIT_OK if all(p.feasible for p in points) else EXIT_RESULT


def cmd_threshold(args) -> int:
    t = positivity_threshold(args.n, _build_config(CertifierConfig, args))
    _emit(args, f"T_threshold = {t:.6f}", json.dumps({"n": args.n, "threshold": t}) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify_protocol3()
    _emit(args, format_report(report), json.dumps(report.to_dict(), indent=2) + "\n")
    return EXIT_OK


def _resolve_strategy(args):
    spec = args.strategy
    if spec == "qrac3":
        return build_protocol3()
    if spec == "optimal":
        if args.n is None:
            raise UsageError("--strategy optimal needs --n")
        return seesaw_optimize(args.n, _build_config(SeesawConfig, args)).strategy
    try:
        return load_strategy(spec)
    except OSError as exc:
        raise UsageError(f"cannot read strategy {spec}: {exc}") from exc


def cmd_simulate(args) -> int:
    strategy = _resolve_strategy(args)
    seed = 0 if args.seed is None else args.seed
    transcript = run_protocol(strategy, args.rounds, seed)
    t_hat, err = estimate_witness(transcript) if transcript.counts.sum(axis=2).all() else (math.nan, math.nan)
    _emit(args, f"rounds = {transcript.rounds}\nT_hat = {t_hat:.9f}\nT_std_err = {err:.9f}",
          transcript.to_json())
    return EXIT_OK


def cmd_certify(args) -> int:
    try:
        transcript = load_transcript(args.transcript)
    except OSError as exc:
        raise UsageError(f"cannot read transcript {args.transcript}: {exc}") from exc
    t_hat, err = estimate_witness(transcript)
    rate = certify_rate(t_hat, err, transcript.n, args.confidence,
                        _build_config(CertifierConfig, args))
    text = (f"T_hat = {rate.t_hat:.9f}\nT_std_err = {rate.t_std_err:.9f}\n"
            f"T_lower = {rate.t_lower:.9f}\nH_min_rate = {rate.h_min_rate:.9f}")
    _emit(args, text, json.dumps(dataclasses.asdict(rate), indent=2) + "\n")
    return EXIT_OK


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qrac", description=__doc__.split("\n")[0],
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    def add(name, func, help_text, *, n=True, out=True, search=False):
        p = sub.add_parser(name, help=help_text)
        if n:
            p.add_argument("--n", type=int, required=True)
        if search:
            p.add_argument("--starts", type=int)
            p.add_argument("--seed", type=_uint64)
            p.add_argument("--config", help="JSON file with config keys")
        if out:
            p.add_argument("--out", help="write the result file here")
        p.set_defaults(func=func)
        return p

    add("classical", cmd_classical, "exact classical-bit bound")
    add("quantum", cmd_quantum, "qubit bound by see-saw", search=True)
    p = add("entropy", cmd_entropy, "certified min-entropy at one witness value", search=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--witness-dir")
    p = add("curve", cmd_curve, "min-entropy over a witness grid (CSV)", search=True)
    p.add_argument("--t-min", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--witness-dir")
    add("threshold", cmd_threshold, "smallest witness value with positive min-entropy", search=True)
    add("verify-qrac3", cmd_verify, "check the explicit 3->1 code", n=False)
    p = add("simulate", cmd_simulate, "simulate protocol rounds", n=False, search=True)
    p.add_argument("--n", type=int)
    p.add_argument("--strategy", required=True, help="optimal | qrac3 | path.json")
    p.add_argument("--rounds", type=int, required=True)
    p = add("certify", cmd_certify, "certify a rate from a transcript", n=False, search=True)
    p.add_argument("--transcript", required=True)
    p.add_argument("--confidence", type=float, default=0.95)
    return parser


def _setup_logging() -> None:
    level = os.environ.get("QRAC_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def run_cli(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"qrac {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InsufficientStatistics as exc:
        print(f"qrac {args.command}: insufficient statistics: {exc}", file=sys.stderr)
        return EXIT_RESULT


def main() -> None:
    sys.exit(run_cli())
