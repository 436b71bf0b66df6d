"""Command-line entry point.

Subcommands map onto the pipeline stages: ``qmetric`` (decompose and
certify the metric), ``maximize`` (boundary-state optimization plus the
reality report), ``emerge`` (survival-fraction series), ``classical``
(integrate/optimize/dwell), ``inflaton``, and ``selftest`` (the
acceptance battery).  Exit codes: 0 success, 2 scenario parse or
validation error, 3 numerical error, 4 selftest failure.
"""

from __future__ import annotations

import argparse
import sys

from .acceptance import run_all
from .errors import NumericalError, ScenarioParseError, ScenarioValidationError
from .scenario import parse_scenario, run_scenario

_FOCUS = {
    "qmetric": ("quantum", "qmetric"),
    "maximize": ("quantum", "maximize"),
    "emerge": ("quantum", "emerge"),
    "classical": ("classical", "full"),
    "inflaton": ("inflaton", "full"),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="futureq",
        description=(
            "Non-Hermitian Hamiltonian toolkit: metric construction, boundary-state"
            " maximization, emergent hermiticity, and classical saddle dwelling."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, scenario_required: bool = True):
        p.add_argument(
            "--scenario",
            required=scenario_required,
            metavar="PATH",
            help="scenario JSON document",
        )
        p.add_argument(
            "--out",
            metavar="DIR",
            default=None,
            help="write summary.json and CSV tables here (default: print summary)",
        )
        p.add_argument(
            "--seed", type=int, default=None, help="override the scenario seed"
        )
        p.add_argument(
            "--quiet", action="store_true", help="suppress stdout reporting"
        )

    add_common(sub.add_parser("qmetric", help="build and certify the Q metric"))
    add_common(
        sub.add_parser("maximize", help="analytic + numeric maximization and reality")
    )
    add_common(sub.add_parser("emerge", help="survival-fraction series"))
    add_common(sub.add_parser("classical", help="integrate, optimize, measure dwell"))
    add_common(sub.add_parser("inflaton", help="uncoupled-mode inflaton toy"))

    st = sub.add_parser("selftest", help="run the acceptance battery")
    st.add_argument(
        "--criteria",
        type=int,
        nargs="*",
        default=None,
        metavar="N",
        help="criterion numbers to run (default: all)",
    )
    st.add_argument("--quiet", action="store_true", help="print only the final tally")
    return parser


def _run_selftest(args) -> int:
    results = run_all(args.criteria)
    for res in results:
        if not args.quiet:
            print(res.line())
    n_fail = sum(not r.passed for r in results)
    n_inc = sum(r.passed and r.inconclusive for r in results)
    tally = f"{len(results) - n_fail}/{len(results)} criteria passed"
    if n_inc:
        tally += f" ({n_inc} inconclusive)"
    print(tally)
    return 4 if n_fail else 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "selftest":
        return _run_selftest(args)

    expected_kind, focus = _FOCUS[args.command]
    try:
        with open(args.scenario, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return 2
    try:
        scenario = parse_scenario(text, seed_override=args.seed)
        if scenario.kind != expected_kind:
            raise ScenarioValidationError(
                f"subcommand '{args.command}' needs a {expected_kind!r} scenario,"
                f" got kind {scenario.kind!r}"
            )
        bundle = run_scenario(scenario, focus=focus)
    except (ScenarioParseError, ScenarioValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3

    if args.out:
        paths = bundle.write(args.out)
        if not args.quiet:
            for p in paths:
                print(p)
    elif not args.quiet:
        print(bundle.summary_json(), end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
