"""Command line: solve, dual-solve, reach, simulate, verify, export.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 numeric guard.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .config import ConfigError, load_spec
from .core import NumericGuardError, as_belief
from .dual import dual_solve
from .primal import solve
from .reach import compute_masks
from .sim import advantage, monte_carlo, reveal_step, rollout
from .strategy import BestResponder, PlayerOne, PlayerTwo

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_GUARD = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _floats(text):
    if text is None:
        return None
    try:
        return [float(s) for s in text.split(",") if s.strip() != ""]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _need(path, what):
    if path is None or not Path(path).is_file():
        raise UsageError(f"missing {what} file: {path}")
    return path


def _mask(args, spec):
    if getattr(args, "mask", None):
        return io.load_mask(_need(args.mask, "mask"), spec)
    return compute_masks(spec)


def _tables(args, spec, need_conj=False):
    mask = _mask(args, spec)
    table = io.load_values(_need(args.values, "value table"), spec, mask)
    conj = None
    if args.conjugate or need_conj:
        conj = io.load_conjugate(_need(args.conjugate, "conjugate table"), spec, mask)
    return mask, table, conj


def _prior(args, spec):
    p = _floats(args.p0)
    if p is not None:
        return as_belief(p)
    if spec.prior is None:
        raise UsageError("the config has no prior; pass --p0")
    return spec.prior


def _x0(args, spec):
    x = _floats(args.x0) if args.x0 is not None else []
    if len(x) != spec.lattice.dim:
        raise UsageError(f"--x0 needs {spec.lattice.dim} coordinates")
    return np.array(x, float)


# ----------------------------------------------------------------------------
# subcommands


def cmd_reach(args):
    spec = load_spec(args.config)
    mask = compute_masks(spec, conservative=args.conservative)
    io.save_mask(args.out, mask, spec)
    print(f"wrote {args.out}: feasible nodes per step {mask.feasible.sum(axis=1).tolist()}")


def cmd_solve(args):
    spec = load_spec(args.config)
    table = solve(spec, _mask(args, spec))
    if not np.all(np.isfinite(table.values)):
        raise NumericGuardError("non-finite entries in the value table")
    io.save_values(args.out, table)
    gap = max(table.diagnostics.get("minimax_gap", [0.0]) or [0.0])
    print(f"wrote {args.out}: shape {list(table.values.shape)}, max minimax gap {gap:.3g}")


def cmd_dual_solve(args):
    spec = load_spec(args.config)
    conj = dual_solve(spec, _mask(args, spec))
    if not np.all(np.isfinite(conj.values)):
        raise NumericGuardError("non-finite entries in the conjugate table")
    io.save_conjugate(args.out, conj)
    ext = sum(conj.diagnostics.get("extrapolated_reads", []))
    print(f"wrote {args.out}: shape {list(conj.values.shape)}, extrapolated reads {ext}")


def cmd_simulate(args):
    spec = load_spec(args.config)
    _, table, conj = _tables(args, spec)
    seeds = list(range(args.seed, args.seed + args.runs))
    summary, recs = monte_carlo(spec, table, conj, _x0(args, spec), args.runs, seeds,
                                p0=_prior(args, spec), type_source=args.type)
    io.write_jsonl(args.out, recs)
    print(f"wrote {args.out}: " + ", ".join(f"{k}={v:.6g}" for k, v in summary.items()))


def cmd_verify(args):
    from .verify import CHECKS
    names = args.only or list(CHECKS)
    bad = [n for n in names if n not in CHECKS]
    if bad:
        raise UsageError(f"unknown checks {bad}; choose from {sorted(CHECKS)}")
    failed = 0
    for n in names:
        res = CHECKS[n]()
        print(res.line())
        failed += not res.passed
    print(f"{len(names) - failed}/{len(names)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


def _export_value(args, spec):
    _, table, _ = _tables(args, spec)
    x = _x0(args, spec)
    p = table.beliefs.p
    vals = [table.value(args.step, x, [q, 1.0 - q]) for q in p]
    io.write_csv(args.out, ["p", "V"], zip(p, vals))


def _positions(spec, mask, k):
    return [(n, spec.lattice.nodes[n]) for n in np.flatnonzero(mask.feasible[k])]


def _export_reveal(args, spec):
    _, table, conj = _tables(args, spec)
    p0 = _prior(args, spec)
    one = PlayerOne(table)
    two = PlayerTwo(conj) if conj is not None else BestResponder(table)
    rows = []
    for _, x in _positions(spec, table.mask, 0):
        recs = [rollout(spec, table, conj, x, p0, args.type, args.seed + s, (one, two))
                for s in range(args.runs)]
        rows.append([*x, float(np.mean([reveal_step(r) for r in recs]))])
    cols = [f"x{i}" for i in range(spec.lattice.dim)] + ["reveal_delay"]
    io.write_csv(args.out, cols, rows)


def _export_advantage(args, spec):
    _, table, _ = _tables(args, spec)
    p = _prior(args, spec)
    rows = [[*x, advantage(table, args.step, x, p)] for _, x in _positions(spec, table.mask, args.step)]
    io.write_csv(args.out, [f"x{i}" for i in range(spec.lattice.dim)] + ["advantage"], rows)


def _export_trajectories(args, spec):
    recs = io.read_jsonl(_need(args.trajectories, "trajectory"))
    if not recs:
        raise UsageError("the trajectory file is empty")
    io.write_csv(args.out, io.trajectory_columns(recs[0]), io.trajectory_rows(recs))


EXPORTS = {"value": _export_value, "reveal-delay": _export_reveal,
           "advantage": _export_advantage, "trajectories": _export_trajectories}


def cmd_export(args):
    spec = load_spec(args.config)
    if not 0 <= args.step <= spec.L - (args.what == "advantage"):
        raise UsageError(f"--step out of range for a {spec.L}-step game")
    EXPORTS[args.what](args, spec)
    print(f"wrote {args.out}")


# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="osig", description="One-sided information games on lattices.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_config(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="JSON game configuration")
        p.add_argument("-o", "--out", required=True, help="output file")
        return p

    p = with_config("reach", "feasibility masks for every step")
    p.add_argument("--conservative", action="store_true",
                   help="a successor is infeasible if any cell corner is")
    p.set_defaults(fn=cmd_reach)

    for name, fn, help_ in (("solve", cmd_solve, "primal value table"),
                            ("dual-solve", cmd_dual_solve, "conjugate value table")):
        p = with_config(name, help_)
        p.add_argument("--mask", help="precomputed mask file (default: recompute)")
        p.set_defaults(fn=fn)

    def with_tables(p, required=True):
        p.add_argument("--values", required=required, help="value table from `solve`")
        p.add_argument("--conjugate", help="conjugate table; without it P2 best-responds")
        p.add_argument("--mask", help="mask file (default: recompute)")
        p.add_argument("--x0", help="initial state, comma separated")
        p.add_argument("--p0", help="initial belief, comma separated (default: config prior)")
        p.add_argument("--type", type=int, default=None, help="fix P1's type (default: sample)")
        p.add_argument("--runs", type=int, default=100)
        p.add_argument("--seed", type=int, default=0, help="first seed; run i uses seed + i")

    p = with_config("simulate", "Monte-Carlo rollouts to JSONL")
    with_tables(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("verify", help="oracle comparison suite")
    p.add_argument("--only", nargs="+", help="subset of checks")
    p.set_defaults(fn=cmd_verify)

    p = with_config("export", "CSV data for plots")
    p.add_argument("what", choices=sorted(EXPORTS))
    with_tables(p, required=False)
    p.add_argument("--step", type=int, default=0, help="time step for value and advantage slices")
    p.add_argument("--trajectories", help="JSONL input for `export trajectories`")
    p.set_defaults(fn=cmd_export)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if args.command == "export" and args.what != "trajectories" and args.values is None:
            raise UsageError("--values is required for this export")
        code = args.fn(args)
        return EXIT_OK if code is None else code
    except UsageError as e:
        print(f"osig: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as e:
        print(f"osig: config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NumericGuardError as e:
        print(f"osig: numeric guard: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (OSError, ValueError) as e:
        print(f"osig: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
