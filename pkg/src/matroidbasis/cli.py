"""Command-line interface: gen / solve / sweep / verify.

The sweep config file is line-oriented ``key=value``::

    family=kuw-hard
    algorithm=partition
    sizes=64,216,512
    seeds=0..19
    samples=2000          # optional overrides: samples, epsilon,
    epsilon=1/64          # budget_threshold
    m=4                   # family parameters (m, parts, r, p, v)

Exit code 0 only when every produced record is valid.
"""

from __future__ import annotations

import argparse
import sys

from .bench import (
    ALGORITHMS,
    FAMILIES,
    ExperimentSpec,
    generate_instance,
    records_to_csv,
    run_experiment,
    solve_instance,
)
from .elements import ElementSet
from .matroids import read_instance
from .views import MatroidView, is_basis, rank_greedy

_FAMILY_PARAM_KEYS = ("m", "parts", "r", "p", "v")
_OVERRIDE_KEYS = ("samples", "epsilon", "budget_threshold")


def _parse_int_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(x) for x in text.split(",") if x)


def parse_config(text: str) -> ExperimentSpec:
    pairs = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value.split("#")[0].strip()
    params = {k: pairs[k] for k in _FAMILY_PARAM_KEYS if k in pairs}
    overrides = {k: pairs[k] for k in _OVERRIDE_KEYS if k in pairs}
    return ExperimentSpec(
        family=pairs["family"],
        sizes=_parse_int_list(pairs["sizes"]),
        seeds=_parse_int_list(pairs["seeds"]),
        algorithm=pairs["algorithm"],
        params=params,
        overrides=overrides,
    )


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_gen(args) -> int:
    params = {"n": args.n} if args.n else {}
    for key in _FAMILY_PARAM_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    if args.family == "kuw-hard" and "n" not in params and "m" not in params:
        raise SystemExit("kuw-hard needs --m or a cube --n")
    instance = generate_instance(args.family, params, args.seed)
    _write(args.out, "\n".join(instance.to_lines()) + "\n")
    return 0


def cmd_solve(args) -> int:
    instance = read_instance(args.instance)
    overrides = {}
    if args.samples is not None:
        overrides["samples"] = args.samples
    if args.epsilon is not None:
        overrides["epsilon"] = args.epsilon
    if args.budget_threshold is not None:
        overrides["budget_threshold"] = args.budget_threshold
    run_log: list[str] = []
    basis, session = solve_instance(
        instance, args.algorithm, args.seed, overrides, run_log=run_log
    )
    view = MatroidView.full(instance)
    ok = is_basis(view, basis)
    rank = rank_greedy(view)
    print(
        f"n={instance.n} algorithm={args.algorithm} basis_size={len(basis)} "
        f"rank={rank} valid={str(ok).lower()} rounds={session.ledger.rounds} "
        f"queries={session.ledger.total_queries}"
    )
    if args.basis_out:
        _write(args.basis_out, " ".join(str(e) for e in basis) + "\n")
    if args.ledger_out:
        _write(args.ledger_out, session.ledger.to_csv())
    if args.log_out and run_log:
        _write(args.log_out, "\n".join(run_log) + "\n")
    return 0 if ok else 1


def cmd_sweep(args) -> int:
    with open(args.config) as fh:
        spec = parse_config(fh.read())
    records = run_experiment(spec)
    _write(args.out, records_to_csv(records, timing=not args.no_timing))
    return 0 if all(r.valid for r in records) else 1


def cmd_verify(args) -> int:
    instance = read_instance(args.instance)
    with open(args.basis) as fh:
        ids = [int(x) for x in fh.read().split()]
    basis = ElementSet.from_indices(ids)
    view = MatroidView.full(instance)
    ok = is_basis(view, basis)
    print(f"n={instance.n} basis_size={len(basis)} valid={str(ok).lower()}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matroidbasis",
        description="Low-adaptivity matroid basis algorithms and benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write an instance file")
    gen.add_argument("--family", choices=FAMILIES, required=True)
    gen.add_argument("--n", type=int)
    gen.add_argument("--m", type=int, help="kuw-hard part count (n = m^3)")
    gen.add_argument("--parts", type=int)
    gen.add_argument("--r", type=int, help="rank parameter (uniform / linear)")
    gen.add_argument("--p", type=int, help="prime field modulus (linear)")
    gen.add_argument("--v", type=int, help="vertex count (random-graph)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default="-")
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="solve one instance with one algorithm")
    solve.add_argument("--instance", required=True)
    solve.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--samples", type=int)
    solve.add_argument("--epsilon")
    solve.add_argument("--budget-threshold", type=int, dest="budget_threshold")
    solve.add_argument("--basis-out")
    solve.add_argument("--ledger-out")
    solve.add_argument("--log-out")
    solve.set_defaults(func=cmd_solve)

    sweep = sub.add_parser("sweep", help="run an experiment spec from a config file")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--out", default="-")
    sweep.add_argument(
        "--no-timing",
        action="store_true",
        help="write wall_ms as 0 so the CSV is byte-reproducible",
    )
    sweep.set_defaults(func=cmd_sweep)

    verify = sub.add_parser("verify", help="check a basis file against an instance")
    verify.add_argument("--instance", required=True)
    verify.add_argument("--basis", required=True)
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
