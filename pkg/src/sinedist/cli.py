"""Command-line interface: ``sinedist distance|probe|verify``.

Exit codes: 0 success, 1 verification violations, 2 input or usage error,
3 dimension mismatch.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import channels as ch
from . import harness
from .errors import DimensionMismatch, SineDistError
from .matrixfile import MatrixFileError, load
from .metrics import distance_report
from .states import DensityMatrix, PureState

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_INPUT = 2
EXIT_DIM = 3


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _dims(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        lo_i = int(lo)
        hi_i = int(hi) if sep else lo_i
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}")
    if lo_i < 2 or hi_i < lo_i:
        raise argparse.ArgumentTypeError(f"need 2 <= LO <= HI, got {text!r}")
    return lo_i, hi_i


def _emit(rows: list[tuple[str, str]], fmt: str, out) -> None:
    if fmt == "records":
        for k, v in rows:
            print(f"{k}\t{v}", file=out)
        return
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{width}}  {v}", file=out)


def _load_state(path: str):
    obj = load(path)
    if not isinstance(obj, (PureState, DensityMatrix)):
        raise MatrixFileError(f"{path}: expected a density or pure state file")
    return obj


def cmd_distance(args, out) -> int:
    a = _load_state(args.file_a)
    b = _load_state(args.file_b)
    if a.dim != b.dim:
        raise DimensionMismatch(f"state dimensions differ: {a.dim} vs {b.dim}")
    rep = distance_report(a, b)
    rows = [(k, f"{getattr(rep, k):.15g}") for k in ("fidelity", "sine", "angle", "bures")]
    _emit(rows, args.format, out)
    return EXIT_OK


def cmd_probe(args, out) -> int:
    op = load(args.channel_file)
    state = _load_state(args.state_file)
    if isinstance(op, ch.Povm):
        if op.dim != state.dim:
            raise DimensionMismatch(f"POVM dim {op.dim} but state dim {state.dim}")
        branches = list(ch.povm_probs(op, state))
        total = ch.success_prob(ch.povm_to_channel(op), state)
    elif isinstance(op, ch.KrausChannel):
        if op.dim_in != state.dim:
            raise DimensionMismatch(f"channel input dim {op.dim_in} but state dim {state.dim}")
        branches = list(ch.branch_probs(op, state))
        total = ch.success_prob(op, state)
    else:
        raise MatrixFileError(f"{args.channel_file}: expected a kraus_set or povm file")
    rows = [("total", f"{total:.15g}")]
    rows += [(f"branch {i}" if args.format == "table" else f"branch\t{i}", f"{p:.15g}") for i, p in enumerate(branches)]
    _emit(rows, args.format, out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    config = harness.SuiteConfig(seed=args.seed, trials=args.trials, dims=args.dims)
    results = harness.run_suite(config, jobs=args.jobs)
    report = harness.to_records(results)
    if args.output:
        Path(args.output).write_text(report, encoding="utf-8")
    if args.format == "records":
        out.write(report)
    else:
        width = max(len(r.check_id) for r in results)
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            print(
                f"{status}  {r.check_id:<{width}}  trials={r.trials:<6d} violations={r.violations:<4d} "
                f"worst_margin={r.worst_margin:+.3e}  tol={r.tolerance:.0e}",
                file=out,
            )
            for f in r.failures:
                print(f"      replay: dim={f.dim} trial={f.trial} sub={f.subcheck} margin={f.margin:+.3e}", file=out)
        print(f"total violations: {harness.total_violations(results)}", file=out)
    return EXIT_OK if harness.total_violations(results) == 0 else EXIT_VIOLATIONS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sinedist", description="Sine distance between quantum states.")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = dict(choices=("table", "records"), default="table", help="output format (default: table)")

    p = sub.add_parser("distance", help="fidelity, sine distance, angle and Bures metric of two states")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("probe", help="success and branch probabilities of a channel or POVM on a state")
    p.add_argument("channel_file")
    p.add_argument("state_file")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("verify", help="run the randomised verification suite")
    p.add_argument("--seed", type=_seed, default=harness.DEFAULT_SEED)
    p.add_argument("--trials", type=_positive_int, default=None, help="trials per dimension for every check")
    p.add_argument("--dims", type=_dims, default=(2, 6), metavar="LO..HI")
    p.add_argument("--output", help="write the tab-separated report here")
    p.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except DimensionMismatch as exc:
        print(f"error: dimension mismatch: {exc}", file=sys.stderr)
        return EXIT_DIM
    except (SineDistError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
