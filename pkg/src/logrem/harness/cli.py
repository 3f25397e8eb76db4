"""Command line entry point.

    logrem <experiment> --config file.json [--n ... --beta ... --seed ...
           --workers ... --out ... --format csv|json]

Flags override config-file values.  Exit codes: 0 success, 2 invalid
configuration (machine-readable JSON error on stderr), 3 oracle mismatch
(a closed form disagreed with its independent check).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from ..sampling import KernelNotPSDError
from .config import EXPERIMENTS, ConfigError, load_config
from .emit import emit
from .runner import EXIT_CONFIG, EXIT_OK, EXIT_ORACLE, OracleMismatch, run


def _num_list(text: str) -> list[float]:
    return [float(part) for part in text.replace(",", " ").split()]


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logrem",
        description="Monte Carlo experiments on the log-correlated circle field",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--n", type=_int_list, help="lattice size or comma list")
    parser.add_argument("--beta", type=_num_list, help="inverse temperature or comma list")
    parser.add_argument("--sigma", type=float)
    parser.add_argument("--sigma1", type=float)
    parser.add_argument("--sigma2", type=float)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--u", type=float)
    parser.add_argument("--gammas", type=_num_list)
    parser.add_argument("--q-grid", dest="q_grid", type=_num_list)
    parser.add_argument("--s", type=int)
    parser.add_argument("--gg-functional", dest="gg_functional", choices=("q12", "one"))
    parser.add_argument("--field-budget", dest="field_budget", type=int)
    parser.add_argument("--replica-budget", dest="replica_budget", type=int)
    parser.add_argument("--pd-budget", dest="pd_budget", type=int)
    parser.add_argument("--seed", type=int, help="root seed (mandatory, here or in config)")
    parser.add_argument("--workers", type=int, help="defaults to LOGREM_WORKERS or 1")
    parser.add_argument("--out", help="output path stem; empty writes to stdout")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--no-verify", action="store_true",
                        help="skip the kernel/quadrature gate before statistical runs")
    parser.add_argument("--timing", action="store_true",
                        help="include wall-clock in result rows (breaks bitwise reproducibility)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        "experiment": args.experiment,
        "n": args.n,
        "beta": args.beta,
        "sigma": args.sigma,
        "sigma1": args.sigma1,
        "sigma2": args.sigma2,
        "alpha": args.alpha,
        "u": args.u,
        "gammas": args.gammas,
        "qGrid": args.q_grid,
        "s": args.s,
        "ggFunctional": args.gg_functional,
        "fieldBudget": args.field_budget,
        "replicaBudget": args.replica_budget,
        "pdSampleBudget": args.pd_budget,
        "rootSeed": args.seed,
        "workers": args.workers,
        "outputPath": args.out,
        "outputFormat": args.format,
    }
    if args.no_verify:
        overrides["verifyFirst"] = False
    if args.timing:
        overrides["timing"] = True

    start = time.perf_counter()
    try:
        cfg = load_config(args.config, overrides)
        records = run(cfg)
        written = emit(records, cfg.output_format, cfg.output_path, cfg.experiment)
    except ConfigError as exc:
        json.dump(exc.payload, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_CONFIG
    except (OracleMismatch, KernelNotPSDError) as exc:
        json.dump({"error": "oracle-mismatch", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_ORACLE
    elapsed = time.perf_counter() - start
    for path in written:
        print(f"wrote {path}", file=sys.stderr)
    print(f"{cfg.experiment}: {len(records)} records in {elapsed:.2f}s", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
