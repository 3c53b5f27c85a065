"""Command line entry point: gen | solve | verify | bench.

Exit codes: 0 success, 1 a verify suite found violations, 2 bad input
(unparsable file, bad flag value, copy budget exceeded), 3 a solver or
protocol broke its contract.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time

from .core import BudgetError, ContractViolation, InputError, ProtocolViolation, WeightedInstance
from .generate import GeneratorSpec, generate, random_weights
from .io import FAMILIES, dumps_instance, format_fraction, loads_instance, parse_fraction
from .models import comm_protocol, run_protocol, run_stream, stream_algorithm
from .reduction import brute_force_opt, check_epsilon, rescale_round, spread_decompose
from .solvers import DEFAULT_CLASS_RESOLUTION, SOLVERS, weighted_mi_reduce
from .suites import SUITES

BENCH_COLUMNS = [
    "instance_id", "family1", "family2", "n", "weights", "W", "epsilon", "solver",
    "weight", "reference", "ratio", "bound", "independence_calls", "rank_calls",
    "unfolded_calls", "classes", "max_classes_per_index", "seconds",
]

EXIT_VIOLATIONS = 1
EXIT_INPUT = 2
EXIT_CONTRACT = 3


def _write(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _weight_range(text):
    if text is None:
        return None
    lo, sep, hi = text.partition(",")
    if not sep:
        raise InputError("--weight-range expects LO,HI")
    return parse_fraction(lo), parse_fraction(hi)


def load_instance(path: str) -> WeightedInstance:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return loads_instance(text)


# ---------------------------------------------------------------- commands


def cmd_gen(args) -> int:
    spec = GeneratorSpec(args.family1, args.family2, args.n, args.seed, args.weights)
    _write(dumps_instance(generate(spec)), args.out)
    return 0


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    eps = parse_fraction(args.epsilon)
    options = {"class_resolution": args.class_resolution, "extraction": args.extraction}
    if args.model == "static":
        report = weighted_mi_reduce(inst, eps, args.solver, **options).to_json()
    elif args.model == "stream":
        alg = stream_algorithm(args.solver, eps, **options)
        report = run_stream(alg, inst, args.order, passes=args.passes,
                            space_cap=args.space_cap,
                            weight_range=_weight_range(args.weight_range)).to_json()
    else:
        protocol = comm_protocol(args.solver, eps, **options)
        partition = args.partition or f"random:{args.seed}:1/2"
        report = run_protocol(protocol, inst, partition,
                              weight_range=_weight_range(args.weight_range)).to_json()
    report["model"] = args.model
    _write(_json(report), args.out)
    return 0


def cmd_verify(args) -> int:
    fn = SUITES[args.suite]
    kwargs = {"seed": args.seed}
    if args.count is not None:
        kwargs["count"] = args.count
    if args.corrupt:
        if args.suite != "axioms":
            raise InputError("--corrupt only applies to the axioms suite")
        kwargs["corrupt"] = True
    report = fn(**kwargs)
    _write(_json(report.to_json()), args.out)
    status = "PASS" if report.ok else "FAIL"
    print(f"{status} {args.suite}: {report.cases} cases, {len(report.failures)} failures",
          file=sys.stderr)
    return 0 if report.ok else EXIT_VIOLATIONS


def bench_rows(pairs, n: int, weight_specs, epsilons, solvers, seeds, reference_limit=12,
               class_resolution=DEFAULT_CLASS_RESOLUTION):
    """One row per (pair, seed, weight spec, epsilon, solver) cell.

    The matroids depend only on (pair, n, seed), so rows that differ only in
    the weight spec share them and expose how calls grow with W.
    """
    rows = []
    for f1, f2 in pairs:
        for seed in seeds:
            base = generate(GeneratorSpec(f1, f2, n, seed, "int:1"))
            for weights in weight_specs:
                rng = random.Random(f"{f1}|{f2}|{n}|{seed}|{weights}")
                values = random_weights(weights, n, rng)
                inst = base.reweighted(dict(enumerate(values)))
                reference = brute_force_opt(inst)[0] if n <= reference_limit else None
                for eps in epsilons:
                    _, rw = rescale_round(inst, eps)
                    spread = spread_decompose(rw.rounded, eps) if rw.rounded else None
                    per_index = max((len(c) for c in spread.classes.values()), default=0) \
                        if spread else 0
                    for solver in solvers:
                        for m in (inst.m1, inst.m2):
                            m.ledger.independence_calls = m.ledger.rank_calls = 0
                        start = time.perf_counter()
                        rep = weighted_mi_reduce(inst, eps, solver,
                                                 class_resolution=class_resolution)
                        seconds = time.perf_counter() - start
                        original = rep.ledgers["original"]
                        ratio = "" if not reference else float(rep.weight / reference)
                        rows.append({
                            "instance_id": f"{f1}-{f2}-n{n}-s{seed}",
                            "family1": f1, "family2": f2, "n": n, "weights": weights,
                            "W": float(inst.aspect_ratio()) if inst.weights else 1.0,
                            "epsilon": format_fraction(eps), "solver": solver,
                            "weight": format_fraction(rep.weight),
                            "reference": "" if reference is None else format_fraction(reference),
                            "ratio": ratio, "bound": float(rep.bound),
                            "independence_calls": original["independence_calls"],
                            "rank_calls": original["rank_calls"],
                            "unfolded_calls": rep.ledgers.get("unfolded_independence_calls", 0),
                            "classes": rep.ledgers.get("distinct_classes", 0),
                            "max_classes_per_index": per_index,
                            "seconds": round(seconds, 4),
                        })
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def growth_summary(rows) -> list[str]:
    """Mean independence calls per weight spec for each (n, epsilon, solver)."""
    groups: dict = {}
    for row in rows:
        key = (row["n"], row["epsilon"], row["solver"])
        groups.setdefault(key, {}).setdefault(row["weights"], []).append(row["independence_calls"])
    lines = []
    for (n, eps, solver), by_weights in sorted(groups.items()):
        parts = [f"{w}: {sum(v) / len(v):.1f}" for w, v in by_weights.items()]
        lines.append(f"n={n} eps={eps} solver={solver} mean calls by weights -> " + ", ".join(parts))
    return lines


def cmd_bench(args) -> int:
    pairs = []
    for item in args.pairs.split(","):
        f1, sep, f2 = item.partition("x")
        if not sep or f1 not in FAMILIES or f2 not in FAMILIES:
            raise InputError(f"family pair must look like graphicxpartition, got {item!r}")
        pairs.append((f1, f2))
    epsilons = [check_epsilon(parse_fraction(e)) for e in args.epsilons.split(",")]
    solvers = args.solvers.split(",")
    for s in solvers:
        if s not in SOLVERS:
            raise InputError(f"unknown solver {s!r}")
    seeds = range(args.seed, args.seed + args.instances)
    rows = bench_rows(pairs, args.n, args.weights.split(","), epsilons, solvers, seeds,
                      class_resolution=args.class_resolution)
    _write(rows_to_csv(rows), args.out)
    for line in growth_summary(rows):
        print(line, file=sys.stderr)
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matroidx",
                                     description="Weighted matroid intersection by reduction "
                                                 "to unweighted solvers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a random instance as JSON")
    p.add_argument("--family1", choices=FAMILIES, default="graphic")
    p.add_argument("--family2", choices=FAMILIES, default="partition")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weights", default="int:4", help="int:<W> or loguniform:<R>")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run a reduction on an instance file")
    p.add_argument("instance")
    p.add_argument("--epsilon", default="1/10")
    p.add_argument("--solver", choices=sorted(SOLVERS), default="exact")
    p.add_argument("--model", choices=("static", "stream", "comm"), default="static")
    p.add_argument("--order", default="natural", help="natural, reverse or random:<seed>")
    p.add_argument("--passes", type=int, default=None)
    p.add_argument("--space-cap", type=int, default=None)
    p.add_argument("--partition", default=None,
                   help="Alice's ids as 0,3,5 or random:<seed>:<fraction>")
    p.add_argument("--weight-range", default=None, help="declared LO,HI for stream and comm")
    p.add_argument("--seed", type=int, default=0, help="seed for the default random partition")
    p.add_argument("--class-resolution", type=int, default=DEFAULT_CLASS_RESOLUTION)
    p.add_argument("--extraction", choices=("auction", "exact"), default="auction")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="run a property suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corrupt", action="store_true", help="axioms only: check a broken oracle")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="benchmark matrix to CSV")
    p.add_argument("--pairs", default="graphicxpartition")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--weights", default="int:1,int:2,int:4,int:8")
    p.add_argument("--epsilons", "--epsilon", dest="epsilons", default="1/10")
    p.add_argument("--solvers", "--solver", dest="solvers", default="exact")
    p.add_argument("--instances", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--class-resolution", type=int, default=DEFAULT_CLASS_RESOLUTION)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ContractViolation, ProtocolViolation) as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (InputError, BudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
