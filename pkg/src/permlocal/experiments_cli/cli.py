"""Command-line entry point.

Exit codes: 0 on success, 1 on bad input, 2 when a threshold check fails.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..limits_exact import enumerate_class, limit_density, symbolic_pat_b, symbolic_pat_e, symbolic_pat_j
from ..perm_core import Permutation, c_occ, format_perm
from ..rooted_order import RootedPermutation, local_distance
from ..samplers import (
    OffspringLaw,
    Overflow,
    RandomStream,
    boltzmann_av231,
    gw_tree,
    limit231_window,
    limit321_window,
    tstar_truncated,
    uniform_av,
    uniform_btree,
    uniform_dyck_word,
)
from ..trees import contour
from . import defaults
from .harness import (
    ExperimentSpec,
    dumps,
    run_convergence,
    run_limit_window_law,
    run_rooted_marginal,
    run_separating_line,
    run_shift_family,
    run_variance_decay,
    run_window_set_uniformity,
    to_tsv,
)
from .verify import SUITES


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2, which is reserved
        raise InputError(message)


def _seed(args: argparse.Namespace) -> int:
    if args.seed is None:
        args.seed = int(np.random.SeedSequence().entropy % (1 << 63))
        print(f"seed={args.seed}", file=sys.stderr)
    return args.seed


def _perm(text: str) -> Permutation:
    return Permutation.parse(text)


# -- subcommands ---------------------------------------------------------------


def cmd_sample(args) -> int:
    stream = RandomStream(_seed(args), args.stream)
    for _ in range(args.count):
        if args.model in ("av231", "av321"):
            print(format_perm(uniform_av(args.model, args.n, stream), compact=False))
        elif args.model == "btree":
            print(contour(uniform_btree(args.n, stream).as_ordered()))
        elif args.model == "dyck":
            print(uniform_dyck_word(args.n, stream))
        elif args.model == "limit231":
            print(limit231_window(args.radius, stream))
        elif args.model == "limit321":
            print(limit321_window(args.radius, stream))
        elif args.model == "boltzmann231":
            out = boltzmann_av231(stream)
            print("overflow" if isinstance(out, Overflow) else format_perm(out, compact=False))
        elif args.model == "gw":
            out = gw_tree(OffspringLaw.geometric_half(), stream)
            print("overflow" if isinstance(out, Overflow) else contour(out))
        elif args.model == "tstar":
            out = tstar_truncated(args.radius, stream)
            print("overflow" if isinstance(out, Overflow) else f"{contour(out.tree)} {out.vertex}")
    return 0


def cmd_cocc(args) -> int:
    count = c_occ(args.pattern, args.sigma)
    print(f"{count} {Fraction(count, len(args.sigma))}")
    return 0


def cmd_limit(args) -> int:
    print(limit_density(args.model, args.pattern))
    return 0


def cmd_symbolic(args) -> int:
    poly = {"j": symbolic_pat_j, "b": symbolic_pat_b, "e": symbolic_pat_e}[args.which](args.pattern)
    print(poly.factored())
    print("coefficients: " + " ".join(poly.coefficient_list()))
    print(f"at p=1/2: {poly(Fraction(1, 2))}")
    return 0


def cmd_dist(args) -> int:
    print(local_distance(RootedPermutation.parse(args.a), RootedPermutation.parse(args.b)))
    return 0


def cmd_enumerate(args) -> int:
    members = enumerate_class(args.model[2:], args.n)
    if args.count_only:
        print(len(members))
    else:
        for s in members:
            print(format_perm(s, compact=False))
    return 0


def _emit(args, spec: dict, records) -> None:
    text = to_tsv(records) if args.format == "tsv" else dumps(spec, records) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_experiment(args) -> int:
    seed = _seed(args)
    failures: list[str] = []
    patterns = tuple(args.pattern) if args.pattern else None
    if args.kind in ("convergence", "rooted"):
        spec = ExperimentSpec(args.model, args.n, args.samples, args.pattern_size, seed, args.workers,
                              args.radius, patterns)
        records = run_convergence(spec) if args.kind == "convergence" else run_rooted_marginal(spec)
        for r in records:
            if r.abs_error is not None and r.abs_error > defaults.CONVERGENCE_TOL:
                failures.append(f"{r.pattern}: abs_error {r.abs_error:.4f}")
            if r.empirical_variance > defaults.VARIANCE_MAX:
                failures.append(f"{r.pattern}: variance {r.empirical_variance:.5f}")
        spec_dict = dict(experiment=args.kind, **spec.to_dict())
    elif args.kind == "variance":
        pattern = patterns[0] if patterns else "123"
        grid = args.n_grid or [args.n]
        table = run_variance_decay(args.model, pattern, grid, args.samples, seed, args.workers)
        records = table.records
        if table.summary["final_variance"] > defaults.VARIANCE_MAX:
            failures.append(f"final variance {table.summary['final_variance']:.5f}")
        spec_dict = dict(experiment="variance", model=args.model, pattern=pattern, n_grid=grid,
                         samples=args.samples, seed=seed)
    elif args.kind == "window-law":
        records = run_limit_window_law(args.model, args.radius or 1, args.samples, seed, args.workers)
        failures += [f"{r.pattern}: abs_error {r.abs_error:.4f}" for r in records
                     if r.abs_error > defaults.LIMIT_WINDOW_TOL]
        spec_dict = dict(experiment="window-law", model=args.model, radius=args.radius or 1,
                         samples=args.samples, seed=seed)
    elif args.kind == "shift":
        pats = list(patterns) if patterns else ["12"]
        radius = args.radius or defaults.SHIFT_RADIUS
        shifts = list(range(-defaults.SHIFT_RANGE, defaults.SHIFT_RANGE + 1))
        tables = run_shift_family(args.model, pats, shifts, radius, args.samples, seed, args.workers)
        records = [r for t in tables for r in t.records]
        for pi, table in zip(pats, tables):
            if table.summary["spread"] > defaults.SHIFT_SPREAD_MAX:
                failures.append(f"{pi}: spread {table.summary['spread']:.4f}")
        spec_dict = dict(experiment="shift", model=args.model, patterns=pats, shifts=shifts, radius=radius,
                         samples=args.samples, seed=seed)
    elif args.kind == "separating":
        k = args.radius or defaults.SEPARATING_RADIUS
        records = [run_separating_line(args.n, k, args.samples, seed, args.workers)]
        if records[0].empirical_mean < defaults.SEPARATING_MIN:
            failures.append(f"frequency {records[0].empirical_mean:.4f}")
        spec_dict = dict(experiment="separating", n=args.n, k=k, samples=args.samples, seed=seed)
    else:
        k = args.radius or 1
        table = run_window_set_uniformity(args.n, k, args.samples, seed, args.workers)
        records = table.records
        failures += [f"{r.pattern}: abs_error {r.abs_error:.4f}" for r in records
                     if r.abs_error > defaults.WINDOW_SET_TOL]
        spec_dict = dict(experiment="window-set", n=args.n, k=k, samples=args.samples, seed=seed,
                         discarded_fraction=table.summary["discarded_fraction"])
    _emit(args, spec_dict, records)
    if args.check and failures:
        for f in failures:
            print(f"FAIL {f}", file=sys.stderr)
        return 2
    return 0


# -- verify ------------------------------------------------------------------------


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    failed = False
    for name in names:
        bad = SUITES[name](args.max_n, args.seed if args.seed is not None else 0)
        print(f"{name}: {'ok' if not bad else 'FAIL'}")
        for b in bad[:20]:
            print(f"  {b}")
        failed |= bool(bad)
    return 2 if failed else 0


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="permlocal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="draw random objects")
    p.add_argument("--model", required=True,
                   choices=["av231", "av321", "btree", "dyck", "limit231", "limit321", "boltzmann231", "gw", "tstar"])
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--stream", type=int, default=0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("cocc", help="consecutive occurrences of a pattern")
    p.add_argument("--pattern", type=_perm, required=True)
    p.add_argument("--sigma", type=_perm, required=True)
    p.set_defaults(func=cmd_cocc)

    p = sub.add_parser("limit", help="exact limiting pattern density")
    p.add_argument("--model", choices=["av231", "av321"], required=True)
    p.add_argument("--pattern", type=_perm, required=True)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("symbolic", help="pattern probability for the binary GW tree as a polynomial in p")
    p.add_argument("--pattern", type=_perm, required=True)
    p.add_argument("--which", choices=["j", "b", "e"], default="j")
    p.set_defaults(func=cmd_symbolic)

    p = sub.add_parser("dist", help="local distance of two rooted permutations")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("enumerate", help="list a pattern class")
    p.add_argument("--model", choices=["av231", "av321"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    p.add_argument("kind", choices=["convergence", "rooted", "variance", "window-law", "shift", "separating",
                                    "window-set"])
    p.add_argument("--model", default="av231", choices=["av231", "av321", "limit231", "limit321"])
    p.add_argument("--n", type=int, default=defaults.DESK_N)
    p.add_argument("--n-grid", type=int, nargs="+")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--pattern", action="append")
    p.add_argument("--pattern-size", type=int, default=3)
    p.add_argument("--radius", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "tsv"], default="json")
    p.add_argument("--assert", dest="check", action="store_true")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("verify", help="exhaustive identity checks")
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_verify)
    return parser


def cli_main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _check_models(args)
        return args.func(args)
    except (InputError, ValueError, IndexError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _check_models(args) -> None:
    if args.command != "experiment":
        return
    limit = args.kind in ("window-law", "shift")
    if limit and args.model not in ("limit231", "limit321"):
        raise InputError(f"{args.kind} needs --model limit231 or limit321")
    if args.kind in ("convergence", "rooted", "variance") and args.model not in ("av231", "av321"):
        raise InputError(f"{args.kind} needs --model av231 or av321")


def main() -> None:
    sys.exit(cli_main())
