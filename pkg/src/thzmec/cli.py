"""Command-line entry point: ``thzmec run|figure|validate|windows``."""

import argparse
import sys

from thzmec import channel as ch
from thzmec.errors import ConfigError, InfeasibleError, NonConvergenceError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NONCONVERGENCE = 0, 1, 2, 3, 4


def _cmd_run(args):
    from thzmec.harness.output import Table, emit_outputs
    from thzmec.harness.runner import check_scenario, monte_carlo
    from thzmec.harness.scenario import load_scenario

    scenario = load_scenario(args.config)
    check_scenario(scenario)
    cols, rows = monte_carlo(scenario, args.workers)
    table = Table(args.name, cols, rows, scenario, preset="run")
    for path in emit_outputs([table], args.out):
        print(path)
    return EXIT_OK


def _cmd_figure(args):
    from thzmec.harness.output import emit_outputs
    from thzmec.harness.presets import run_preset
    from thzmec.harness.scenario import Scenario, load_scenario

    base = load_scenario(args.config) if args.config else Scenario()
    if args.trials is not None:
        base = base.replace(trials=args.trials)
    if args.seed is not None:
        base = base.replace(seed=args.seed)
    for path in emit_outputs(run_preset(args.name, base, args.workers), args.out):
        print(path)
    return EXIT_OK


def _cmd_validate(args):
    from thzmec.validation import run_all

    results = run_all(args.seed)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def _cmd_windows(args):
    print(f"{'name':<7}{'f_THz':>8}{'W_GHz':>8}{'k_abs_1/m':>11}{'noise_dBm':>11}")
    for name in sorted(ch.WINDOWS):
        w = ch.WINDOWS[name]
        noise = ch.watts_to_dbm(ch.noise_power(w.bandwidth))
        print(f"{name:<7}{w.center_frequency / 1e12:>8.2f}{w.bandwidth / 1e9:>8.0f}"
              f"{w.absorption_coeff:>11.4g}{noise:>11.2f}")
    return EXIT_OK


def build_parser():
    from thzmec.harness.presets import PRESETS

    p = argparse.ArgumentParser(prog="thzmec", description="THz NOMA offloading simulator")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Monte-Carlo run of one scenario file")
    run.add_argument("--config", required=True)
    run.add_argument("--out", default="out")
    run.add_argument("--name", default="run", help="output file stem")
    run.add_argument("--workers", type=int, default=None)
    run.set_defaults(func=_cmd_run)

    fig = sub.add_parser("figure", help="run a figure preset")
    fig.add_argument("name", choices=sorted(PRESETS, key=lambda n: int(n[3:])))
    fig.add_argument("--config", default=None, help="base scenario (defaults when omitted)")
    fig.add_argument("--out", default="out")
    fig.add_argument("--trials", type=int, default=None)
    fig.add_argument("--seed", type=int, default=None)
    fig.add_argument("--workers", type=int, default=None)
    fig.set_defaults(func=_cmd_figure)

    val = sub.add_parser("validate", help="run the brute-force oracle suites")
    val.add_argument("--seed", type=int, default=7)
    val.set_defaults(func=_cmd_validate)

    win = sub.add_parser("windows", help="list the THz transmission windows")
    win.set_defaults(func=_cmd_windows)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"infeasible scenario: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NonConvergenceError as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
