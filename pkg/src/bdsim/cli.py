"""Command-line front end: ``bdsim {simulate,sweep,decay,kernels,identities}``.

Exit codes: 0 success, 1 failed check (identities or kernel oracle),
2 configuration or input error, 3 integration failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import replace

from . import experiments as ex
from .config import ConfigError, RunConfig, build_config, load_config
from .errors import IntegrationFailure, InvalidInputError
from .grid import set_fft_workers

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_INTEGRATION = 0, 1, 2, 3

log = logging.getLogger("bdsim")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--out-dir", help="output directory (default: $BDSIM_OUT_DIR/<command>)")
    common.add_argument("--seed", type=int, help="override the initial-data seed")
    common.add_argument("--threads", type=int, default=1, help="FFT worker threads")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="bdsim", description="Damped Boussinesq spectral toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="run one simulation and record the ledger")
    sub.add_parser("sweep", parents=[common], help="simulate over a list of amplitudes")
    sub.add_parser("decay", parents=[common], help="linear decay study of region-localized data")
    k = sub.add_parser("kernels", parents=[common], help="tabulate and check the linear kernels")
    k.add_argument("--lattice-bound", type=int)
    k.add_argument("--times", help="comma-separated sample times")
    k.add_argument("--inject-fault", choices=ex.FAULTS, help=argparse.SUPPRESS)
    i = sub.add_parser("identities", parents=[common], help="run the identity battery")
    i.add_argument("--seeds", type=int, help="number of seeds")
    i.add_argument("--sizes", help="comma-separated grid sizes")
    return p


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else build_config({})
    if args.seed is not None:
        cfg.init = replace(cfg.init, seed=args.seed)
        cfg.raw["seed"] = str(args.seed)
    return cfg


def _out_dir(args) -> str:
    if args.out_dir:
        return args.out_dir
    root = os.environ.get("BDSIM_OUT_DIR", "bdsim_out")
    return os.path.join(root, args.command)


def _dispatch(args, cfg: RunConfig, out: str) -> ex.RunResult:
    run = cfg.run
    if args.command == "simulate":
        res, _ = ex.run_simulation(cfg.solver, cfg.init, out, run["snapshot_every"])
        return res
    if args.command == "sweep":
        return ex.run_sweep(cfg.solver, cfg.init, run["sweep_amplitudes"], out)
    if args.command == "decay":
        return ex.run_decay(cfg.solver, cfg.init, out, run["decay_samples"])
    if args.command == "kernels":
        bound = args.lattice_bound if args.lattice_bound is not None else run["kernel_lattice_bound"]
        times = ([float(t) for t in args.times.split(",") if t.strip()]
                 if args.times is not None else run["kernel_times"])
        return ex.run_kernels(bound, times, out, args.inject_fault)
    seeds = args.seeds if args.seeds is not None else run["identity_seeds"]
    sizes = ([int(v) for v in args.sizes.split(",") if v.strip()]
             if args.sizes is not None else run["identity_sizes"])
    base = cfg.init.seed
    return ex.run_identities(range(base, base + seeds), sizes, out, cfg.solver.sobolev_s)


def _exit_code(status: str) -> int:
    if status in ("completed", "resolution_flagged"):
        return EXIT_OK
    if status == "integration_failure":
        return EXIT_INTEGRATION
    return EXIT_CHECK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be positive")
        set_fft_workers(args.threads)
        cfg = _load(args)
        out = _out_dir(args)
        os.makedirs(out, exist_ok=True)
        started = time.time()
        result = _dispatch(args, cfg, out)
    except (ConfigError, InvalidInputError, ValueError) as exc:
        print(f"bdsim: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationFailure as exc:
        print(f"bdsim: integration failure at t={exc.time}: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    finished = time.time()
    config_doc = {**{k: list(v) if isinstance(v, tuple) else v for k, v in cfg.run.items()},
                  **ex.config_snapshot(cfg.solver, cfg.init)}
    ex.write_manifest(out, args.command, config_doc, cfg.init.seed, started, finished, result)
    print(f"{args.command}: {result.status} -> {out}")
    return _exit_code(result.status)


if __name__ == "__main__":
    sys.exit(main())
