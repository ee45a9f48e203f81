"""Command-line interface.

Exit codes: 0 success, 1 input error, 2 statistic undefined (``V_n <= 0``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .io import (
    InputError,
    ReportDocument,
    digest_values,
    profile_csv,
    read_column_file,
    write_column_text,
)
from .montecarlo import (
    NORMALIZATIONS,
    SCENARIO_NAMES,
    Scenario,
    named_scenario,
    run_scenario,
    tail_diagnostic,
)
from .processes import RNG_ALGORITHM, ProcessSpec, RngContract
from .testing import (
    KnownDistribution,
    TestReport,
    adjacent_test,
    one_sample_test,
    projections,
    two_sample_test,
)
from .ustat import TIE_POLICIES
from .varest import ALTERNATIVES, BandwidthConfig, covariance_profile

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNDEFINED = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _bandwidth(args) -> BandwidthConfig:
    return BandwidthConfig(
        a_lag=args.a_lag,
        b_lag=getattr(args, "b_lag", 0),
        ties=getattr(args, "ties", "strict"),
        alternative=args.alternative,
    )


def _finish_test(report: TestReport, command: dict, digest: str, out) -> int:
    doc = ReportDocument(kind="test", payload=report, command=command, inputs_digest=digest)
    _emit(doc.to_json(), out)
    if not report.defined:
        print("warning: nonpositive variance estimate; statistic undefined", file=sys.stderr)
        return EXIT_UNDEFINED
    return EXIT_OK


def cmd_test_two_sample(args) -> int:
    x = read_column_file(args.x)
    y = read_column_file(args.y)
    report = two_sample_test(x, y, _bandwidth(args))
    command = {
        "command": "test-two-sample", "x": args.x, "y": args.y, "a_lag": args.a_lag,
        "b_lag": args.b_lag, "alternative": args.alternative, "ties": args.ties,
    }
    return _finish_test(report, command, digest_values(x, y), args.out)


def cmd_test_one_sample(args) -> int:
    x = read_column_file(args.x)
    dist = KnownDistribution.parse(args.dist)
    report = one_sample_test(x, dist, args.a_lag, alternative=args.alternative)
    command = {
        "command": "test-one-sample", "x": args.x, "dist": dist.to_text(),
        "a_lag": args.a_lag, "alternative": args.alternative,
    }
    return _finish_test(report, command, digest_values(x), args.out)


def cmd_test_adjacent(args) -> int:
    s = read_column_file(args.series)
    report = adjacent_test(s, args.split, _bandwidth(args))
    command = {
        "command": "test-adjacent", "series": args.series, "split": args.split,
        "a_lag": args.a_lag, "b_lag": args.b_lag, "alternative": args.alternative, "ties": args.ties,
    }
    return _finish_test(report, command, digest_values(s), args.out)


def cmd_covplot(args) -> int:
    x = read_column_file(args.x)
    if args.y is None:
        gx = covariance_profile(x, args.max_lag)
        gy = None
    else:
        y = read_column_file(args.y)
        hx, gy_seq, _ = projections(x, y)
        gx = covariance_profile(hx, args.max_lag)
        gy = covariance_profile(gy_seq, args.max_lag)
    _emit(profile_csv(gx, gy), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = ProcessSpec.parse(args.process)
    values = spec.sample(args.n, RngContract(args.seed, args.stream))
    _emit(write_column_text(values), args.out)
    return EXIT_OK


def _load_scenario(token: str) -> Scenario:
    if token in SCENARIO_NAMES:
        return named_scenario(token)
    if os.path.exists(token):
        try:
            with open(token, encoding="utf-8") as fh:
                return Scenario.from_dict(json.load(fh))
        except json.JSONDecodeError as exc:
            raise InputError(f"{token}: invalid JSON ({exc})") from None
    raise InputError(f"unknown scenario {token!r}; use a file or one of: {', '.join(SCENARIO_NAMES)}")


def _parse_sizes(text: str) -> list:
    sizes = []
    for item in text.split(","):
        n, sep, m = item.strip().partition(";") if ";" in item else item.strip().partition("x")
        if not sep:
            raise InputError(f"bad size {item!r}; expected N;M or NxM")
        sizes.append([int(n), int(m)])
    return sizes


def _default_threads() -> int:
    env = os.environ.get("MWDEP_THREADS")
    if env is None:
        return 1
    try:
        return max(1, int(env))
    except ValueError:
        raise InputError(f"MWDEP_THREADS must be an integer, got {env!r}") from None


def cmd_mc(args) -> int:
    if args.trials is not None and args.trials < 1:
        raise InputError("--trials must be at least 1")
    threads = args.threads if args.threads is not None else _default_threads()
    if threads < 1:
        raise InputError("--threads must be at least 1")
    d = _load_scenario(args.scenario).to_dict()
    for key in ("trials", "a_lag", "b_lag", "center"):
        value = getattr(args, key)
        if value is not None:
            d[key] = value
    if args.sizes:
        d["sizes"] = _parse_sizes(args.sizes)
    scenario = Scenario.from_dict(d)
    report = run_scenario(scenario, args.seed, threads=threads)
    # thread count deliberately absent: reports must not depend on it
    command = {"command": "mc", "scenario": args.scenario, "seed": args.seed}
    for key in ("trials", "sizes", "a_lag", "b_lag", "center"):
        if getattr(args, key) is not None:
            command[key] = getattr(args, key)
    doc = ReportDocument(
        kind="montecarlo",
        payload=report,
        command=command,
        rng={"algorithm": RNG_ALGORITHM, "master_seed": args.seed},
    )
    _emit(doc.to_json(), args.out)
    return EXIT_OK


def cmd_tail(args) -> int:
    threads = args.threads if args.threads is not None else _default_threads()
    table = tail_diagnostic(
        ProcessSpec.parse(args.x),
        ProcessSpec.parse(args.y),
        n_grid=[int(v) for v in args.n_grid.split(",")],
        thresholds=[float(v) for v in args.thresholds.split(",")],
        trials=args.trials,
        normalization=args.normalization,
        pi=args.pi,
        master_seed=args.seed,
        threads=threads,
    )
    command = {
        "command": "tail", "x": args.x, "y": args.y, "n_grid": args.n_grid,
        "thresholds": args.thresholds, "trials": args.trials,
        "normalization": args.normalization, "pi": args.pi, "seed": args.seed,
    }
    doc = ReportDocument(kind="tail", payload=table, command=command,
                         rng={"algorithm": RNG_ALGORITHM, "master_seed": args.seed})
    _emit(doc.to_json(), args.out)
    return EXIT_OK


def cmd_scenarios(args) -> int:
    if args.name:
        _emit(json.dumps(named_scenario(args.name).to_dict(), indent=2) + "\n", None)
    else:
        _emit("".join(name + "\n" for name in SCENARIO_NAMES), None)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mwdep", description="Mann-Whitney tests corrected for short-range dependence.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def lags(sp, two=True):
        sp.add_argument("--a-lag", type=int, default=0, help="lag truncation for the first sample")
        if two:
            sp.add_argument("--b-lag", type=int, default=0, help="lag truncation for the second sample")
        sp.add_argument("--alternative", choices=ALTERNATIVES, default="greater")
        if two:
            sp.add_argument("--ties", choices=TIE_POLICIES, default="strict")
        sp.add_argument("--out", default=None, help="output path (default stdout)")

    sp = sub.add_parser("test-two-sample", help="two independent series")
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    lags(sp)
    sp.set_defaults(func=cmd_test_two_sample)

    sp = sub.add_parser("test-one-sample", help="one series against a known law")
    sp.add_argument("--x", required=True)
    sp.add_argument("--dist", required=True, help="normal:MU,SIGMA or uniform:LO,HI")
    lags(sp, two=False)
    sp.set_defaults(func=cmd_test_one_sample)

    sp = sub.add_parser("test-adjacent", help="two adjacent blocks of one series")
    sp.add_argument("--series", required=True)
    sp.add_argument("--split", type=int, required=True, help="length of the first block")
    lags(sp)
    sp.set_defaults(func=cmd_test_adjacent)

    sp = sub.add_parser("covplot", help="autocovariance profile CSV for choosing lags")
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", default=None)
    sp.add_argument("--max-lag", type=int, required=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_covplot)

    sp = sub.add_parser("simulate", help="write a simulated series")
    sp.add_argument("--process", required=True, help="e.g. lsv:gamma=0.25")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("mc", help="Monte-Carlo level/power study")
    sp.add_argument("--scenario", required=True, help=f"JSON file or one of: {', '.join(SCENARIO_NAMES)}")
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=None, help="worker threads (default $MWDEP_THREADS or 1)")
    sp.add_argument("--sizes", default=None, help="override size ladder, e.g. '750;500,300;200'")
    sp.add_argument("--a-lag", type=int, default=None)
    sp.add_argument("--b-lag", type=int, default=None)
    sp.add_argument("--center", type=float, default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_mc)

    sp = sub.add_parser("tail", help="exceedance frequencies of the normalized U-statistic")
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--n-grid", required=True, help="comma-separated sample sizes")
    sp.add_argument("--thresholds", required=True, help="comma-separated thresholds")
    sp.add_argument("--trials", type=int, default=500)
    sp.add_argument("--normalization", choices=NORMALIZATIONS, default="sqrt_n")
    sp.add_argument("--pi", type=float, default=0.5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_tail)

    sp = sub.add_parser("scenarios", help="list built-in scenarios or print one as JSON")
    sp.add_argument("name", nargs="?", choices=SCENARIO_NAMES)
    sp.set_defaults(func=cmd_scenarios)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError, OverflowError) as exc:
        print(f"mwdep: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
