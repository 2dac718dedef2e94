"""Command-line interface.

Subcommands cover single-object plumbing (field, gmc, winding, levyarea)
and the statistical estimators (chen, scaling, werner, tail, proxy,
regularity, phi-map), plus report merging.  A JSON config file supplies
parameters; flags override its top-level scalars.  Exit codes: 0 success,
2 config error, 3 estimator precondition failure, 4 assertion failure
under --assert.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .area import cutoff_integral, levelsum_partial
from .field import sample_field
from .gmc import gmc_from_field
from .harness import (ConfigError, EstimateReport, ExperimentConfig, OUT_DIR_ENV,
                      _closed, _path_from_config, merge_reports, run_experiment)
from .winding import winding_field

_SUBCOMMAND_ESTIMATOR = {
    "gmc": "mass-intensity",
    "chen": "chen",
    "scaling": "scaling",
    "werner": "werner",
    "tail": "tail-decay",
    "proxy": "proxy-comparison",
    "regularity": "regularity",
    "phi-map": "phi-map",
}

_PLUMBING = ("field", "winding", "levyarea")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gmcarea",
                                 description="winding-number areas against chaos measures")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--out", help="output directory")
        p.add_argument("--workers", type=int, help="worker count (0 = auto)")
        p.add_argument("--gamma", type=float, help="intermittency parameter")
        p.add_argument("--grid", nargs=3, metavar=("NX", "NY", "H"),
                       help="grid cells and spacing")
        p.add_argument("--quiet", action="store_true")
        p.add_argument("--assert", dest="assert_", action="store_true",
                       help="exit 4 when the estimator's threshold check fails")

    for name in list(_SUBCOMMAND_ESTIMATOR) + list(_PLUMBING):
        common(sub.add_parser(name))
    rp = sub.add_parser("report")
    rsub = rp.add_subparsers(dest="report_command", required=True)
    mp = rsub.add_parser("merge")
    mp.add_argument("paths", nargs="+", help="report JSON files")
    mp.add_argument("--out", help="output directory")
    mp.add_argument("--quiet", action="store_true")
    return ap


def _load_config(args, default_name: str, force_name: bool = False) -> ExperimentConfig:
    d = {}
    if args.config:
        with open(args.config) as f:
            d = json.load(f)
    if force_name:
        d["name"] = default_name
    else:
        d.setdefault("name", default_name)
    if args.seed is not None:
        d["seed"] = args.seed
    if args.out is not None:
        d["out_dir"] = args.out
    if args.workers is not None:
        d["workers"] = args.workers
    if args.gamma is not None:
        d["gamma"] = args.gamma
    if args.grid is not None:
        nx, ny, h = int(args.grid[0]), int(args.grid[1]), float(args.grid[2])
        g = d.get("grid", {})
        d["grid"] = {"origin_x": g.get("origin_x", 0.0), "origin_y": g.get("origin_y", 0.0),
                     "h": h, "nx": nx, "ny": ny}
    return ExperimentConfig.from_dict(d)


def _out_dir(cfg: ExperimentConfig) -> str:
    out = os.environ.get(OUT_DIR_ENV, cfg.out_dir)
    os.makedirs(out, exist_ok=True)
    return out


def _run_plumbing(cmd: str, cfg: ExperimentConfig, quiet: bool) -> dict:
    out = _out_dir(cfg)
    if cmd == "field":
        fld = sample_field(cfg.kernel, cfg.grid, cfg.seed)
        base = os.path.join(out, f"field-{cfg.seed}")
        with open(base + ".bin", "wb") as f:
            f.write(fld.to_bytes())
        with open(base + ".csv", "w") as f:
            f.write(fld.to_csv())
        return {"mean": float(fld.values.mean()), "var": float(fld.values.var()),
                "realized_variance": float(fld.realized_variance[0, 0]),
                "clipped_fraction": fld.clipped_fraction, "files": [base + ".bin", base + ".csv"]}
    if cmd == "winding":
        wf = winding_field(_closed(_path_from_config(cfg, 0)), cfg.grid)
        base = os.path.join(out, f"winding-{cfg.seed}")
        with open(base + ".bin", "wb") as f:
            f.write(wf.boundary_mask().to_bytes())
        return {"max_abs_winding": wf.max_abs_winding,
                "boundary_cells": int(wf.boundary.sum()),
                "signed_area": wf.signed_area(), "files": [base + ".bin"]}
    if cmd == "levyarea":
        wf = winding_field(_closed(_path_from_config(cfg, 0)), cfg.grid)
        gmc = gmc_from_field(sample_field(cfg.kernel, cfg.grid, cfg.seed + 1), cfg.gamma)
        total, incs = levelsum_partial(wf, gmc, cfg.K)
        direct = cutoff_integral(wf, gmc, cfg.K)
        base = os.path.join(out, f"levyarea-{cfg.seed}")
        with open(base + ".csv", "w") as f:
            f.write("N,increment\n")
            for i, v in enumerate(incs, 1):
                f.write(f"{i},{v!r}\n")
        return {"K": cfg.K, "levelsum": total, "cutoff_integral": direct,
                "stabilization_K": wf.max_abs_winding, "files": [base + ".csv"]}
    raise ConfigError(f"unknown command {cmd}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    quiet = getattr(args, "quiet", False)

    def emit(obj):
        if not quiet:
            json.dump(obj, sys.stdout, indent=2, default=str)
            sys.stdout.write("\n")

    if args.command == "report":
        try:
            reports = []
            for p in args.paths:
                with open(p) as f:
                    reports.append(EstimateReport.from_json(f.read()))
            merged = merge_reports(reports)
        except (OSError, ValueError, KeyError) as e:
            print(f"merge error: {e}", file=sys.stderr)
            return 2
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            path = os.path.join(args.out, f"merged-{merged.name}.json")
            with open(path, "w") as f:
                f.write(merged.to_json())
        emit(json.loads(merged.to_json()))
        return 0

    try:
        if args.command in _PLUMBING:
            # plumbing commands only need the shared parameters; the
            # estimator name slot is filled with a placeholder
            cfg = _load_config(args, "mass-intensity", force_name=True)
        else:
            cfg = _load_config(args, _SUBCOMMAND_ESTIMATOR[args.command])
    except (ConfigError, OSError, json.JSONDecodeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2

    try:
        if args.command in _PLUMBING:
            results = _run_plumbing(args.command, cfg, quiet)
            emit(results)
            return 0
        report = run_experiment(cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as e:
        print(f"estimator precondition failure: {e}", file=sys.stderr)
        return 3
    emit(json.loads(report.to_json()))
    if args.assert_ and report.results.get("passed") is False:
        print("threshold check failed", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
