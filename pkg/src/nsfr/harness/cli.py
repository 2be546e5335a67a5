"""Command-line interface.

    nsfr run CONFIG [--set key=value ...] [--out DIR]
    nsfr convergence CONFIG --p 2,3 --grids 8,16,32 [--out DIR]
    nsfr sweep-cfl CONFIG --p 2,3,4 --dt-start A --dt-stop B --dt-inc C
    nsfr compare CONFIG --vary key=v1,v2,... [--out DIR]

Exit codes: 0 success, 2 configuration error, 3 positivity failure,
4 step budget exceeded.  NSFR_WORKERS sets the sweep worker count.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..time_integration import BudgetExceededError
from .config import ConfigError, load_config
from .convergence import cli_convergence
from .compare import cli_compare
from .run import EXIT_BUDGET, EXIT_CONFIG, cli_run
from .sweep import cli_sweep_cfl


def _int_list(text):
    return [int(s) for s in text.split(",")]


def build_parser():
    ap = argparse.ArgumentParser(prog="nsfr", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="key=value config file")
        p.add_argument("--set", dest="overrides", action="append",
                       default=[], metavar="KEY=VALUE")
        p.add_argument("--out", default=None)

    p_run = sub.add_parser("run", help="single run with artifacts")
    common(p_run)

    p_conv = sub.add_parser("convergence", help="grid refinement study")
    common(p_conv)
    p_conv.add_argument("--p", type=_int_list, required=True)
    p_conv.add_argument("--grids", type=_int_list, required=True)

    p_sweep = sub.add_parser("sweep-cfl", help="constant-dt positivity sweep")
    common(p_sweep)
    p_sweep.add_argument("--p", type=_int_list, required=True)
    p_sweep.add_argument("--dt-start", type=float, required=True)
    p_sweep.add_argument("--dt-stop", type=float, required=True)
    p_sweep.add_argument("--dt-inc", type=float, required=True)

    p_cmp = sub.add_parser("compare", help="scheme comparison matrix")
    common(p_cmp)
    p_cmp.add_argument("--vary", required=True, metavar="KEY=V1,V2,...")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, args.overrides)
    except (ConfigError, FileNotFoundError, ValueError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out) if args.out else Path("runs") / config.case
    try:
        if args.command == "run":
            return cli_run(config, out)
        if args.command == "convergence":
            report = cli_convergence(config, args.p, args.grids,
                                     out_path=out / "convergence.csv")
            for row in report.rows:
                print(f"p={row.p} {'x'.join(map(str, row.n))} "
                      f"L1={row.l1:.6e} L2={row.l2:.6e} "
                      f"orders=({row.l1_order}, {row.l2_order}) "
                      f"limiter={'on' if row.limiter_active else 'off'}")
            return 0
        if args.command == "sweep-cfl":
            table = cli_sweep_cfl(
                config, args.p,
                (args.dt_start, args.dt_stop, args.dt_inc),
                out_path=out / "sweep.csv")
            for p in args.p:
                last_pass, first_fail = table.bracket(p)
                print(f"p={p} last-pass dt="
                      f"{last_pass.dt if last_pass else None} "
                      f"first-fail dt="
                      f"{first_fail.dt if first_fail else None}")
            return 0
        if args.command == "compare":
            key, _, vals = args.vary.partition("=")
            cli_compare(config, key.strip(), vals.split(","), out_dir=out)
            return 0
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceededError as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        return EXIT_BUDGET
    return 0


if __name__ == "__main__":
    sys.exit(main())
