"""Command-line interface.

Subcommands: gen, run, sweep, oracle, adversary, verify.
Exit codes: 0 success, 2 validation or domain error, 3 guarantee violation
(when --assert-bounds is set or an adversary check fails).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .core import Allocation, FairDivisionError, Instance, fairness_report, format_value
from .fullinfo import best_alpha_bruteforce
from .harness import (
    ALGORITHMS,
    GEN_KINDS,
    adversary_ordinal,
    adversary_query,
    execute,
    generate_instance,
    sweep,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_GUARANTEE = 3


def _default_seed() -> int:
    return int(os.environ.get("EFX_LAB_SEED", "0"))


def _load_instance(path: str) -> Instance:
    with open(path) as fh:
        return Instance.loads(fh.read())


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="efxlab",
        description="Fair-division experiments under ordinal preferences "
        "plus limited value queries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate an instance JSON file")
    p_gen.add_argument("--kind", choices=GEN_KINDS, default="uniform")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--m", type=int)
    p_gen.add_argument("--k", type=int)
    p_gen.add_argument("--t", type=int)
    p_gen.add_argument("--case", type=int, choices=(1, 2), default=2)
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.add_argument("--out", default="-", help="output path, - for stdout")

    p_run = sub.add_parser("run", help="run one algorithm on an instance")
    p_run.add_argument("--instance", required=True)
    p_run.add_argument("--alg", choices=ALGORITHMS, required=True)
    p_run.add_argument("--k", type=int)
    p_run.add_argument("--lambda", dest="lam", type=str)
    p_run.add_argument("--blackbox", choices=("exact", "envy_cycle"), default="envy_cycle")
    p_run.add_argument("--budget", type=int)
    p_run.add_argument(
        "--assert-bounds",
        action="store_true",
        help="exit 3 if the measured factor falls below the guarantee bound",
    )

    p_sweep = sub.add_parser("sweep", help="run a config of jobs, emit CSV")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", default="-")

    p_oracle = sub.add_parser("oracle", help="brute-force best EFX factor")
    p_oracle.add_argument("--instance", required=True)

    p_adv = sub.add_parser("adversary", help="run an algorithm against a family")
    p_adv.add_argument("--family", choices=("ordinal", "query"), required=True)
    p_adv.add_argument("--n", type=int, required=True)
    p_adv.add_argument("--m", type=int)
    p_adv.add_argument("--k", type=int)
    p_adv.add_argument("--t", type=int)
    p_adv.add_argument("--alg", choices=ALGORITHMS, required=True)
    p_adv.add_argument("--budget", type=int)

    p_verify = sub.add_parser("verify", help="validate and score an allocation")
    p_verify.add_argument("--instance", required=True)
    p_verify.add_argument("--allocation", required=True)
    return parser


def _emit(data: dict, path: str = "-") -> None:
    text = json.dumps(data, indent=2)
    if path == "-":
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            seed = args.seed if args.seed is not None else _default_seed()
            instance = generate_instance(
                args.kind, args.n, args.m, k=args.k, t=args.t, case=args.case, seed=seed
            )
            _emit(instance.to_json(), args.out)
            return EXIT_OK

        if args.command == "run":
            instance = _load_instance(args.instance)
            record = execute(
                instance,
                args.alg,
                k=args.k,
                lam=Fraction(args.lam) if args.lam else None,
                blackbox=args.blackbox,
                budget=args.budget,
                instance_id=os.path.basename(args.instance),
            )
            _emit(record.to_json())
            if args.assert_bounds and not record.bound_satisfied:
                return EXIT_GUARANTEE
            return EXIT_OK

        if args.command == "sweep":
            with open(args.config) as fh:
                config = json.load(fh)
            if args.out == "-":
                sweep(config, sys.stdout)
            else:
                with open(args.out, "w", newline="") as fh:
                    sweep(config, fh)
            return EXIT_OK

        if args.command == "oracle":
            instance = _load_instance(args.instance)
            alpha, witness = best_alpha_bruteforce(instance)
            _emit(
                {
                    "best_alpha": format_value(alpha),
                    "best_alpha_decimal": float(alpha),
                    "allocation": witness.to_json(),
                }
            )
            return EXIT_OK

        if args.command == "adversary":
            if args.family == "ordinal":
                if args.m is None:
                    raise FairDivisionError("ordinal family needs --m")
                result = adversary_ordinal(args.n, args.m, args.alg)
            else:
                if args.k is None or args.t is None:
                    raise FairDivisionError("query family needs --k and --t")
                budget = args.budget if args.budget is not None else args.k
                result = adversary_query(args.n, args.k, args.t, args.alg, budget)
            _emit(result)
            return EXIT_OK if result["pass"] else EXIT_GUARANTEE

        if args.command == "verify":
            instance = _load_instance(args.instance)
            with open(args.allocation) as fh:
                allocation = Allocation.from_json(json.load(fh), m=instance.m)
            report = fairness_report(instance, allocation)
            _emit(
                {
                    "alpha_efx": format_value(report.alpha_efx),
                    "alpha_efx_decimal": float(report.alpha_efx),
                    "alpha_ef1": format_value(report.alpha_ef1),
                    "alpha_ef1_decimal": float(report.alpha_ef1),
                    "efx_binding": report.efx_binding,
                    "ef1_binding": report.ef1_binding,
                }
            )
            return EXIT_OK
    except FairDivisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
