"""Command line entry point: run, battery, report."""

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .scenario import (ENGINES, apply_overrides, load_config, load_manifest, run_scenario,
                       summary_table, write_outputs)


def _overrides(args):
    return dict(grid_size=args.grid_size, time_samples=args.time_samples,
                tolerance=args.tolerance, engine=args.engine, w_sign=args.w_sign)


def _execute(cfg, out_dir):
    report, artifacts = run_scenario(cfg)
    write_outputs(out_dir, report, artifacts)
    return report


def cmd_run(args):
    try:
        cfg = apply_overrides(load_config(args.config), **_overrides(args))
    except (OSError, ValueError) as exc:
        report = {"scenario": str(args.config), "status": "error", "error": str(exc)}
        write_outputs(Path(args.out_dir) / Path(args.config).stem, report, {})
        print(summary_table([report]))
        return 2
    out = Path(args.out_dir) / cfg["name"]
    report = _execute(cfg, out)
    print(summary_table([report]))
    print(f"\n{cfg['name']}: {report['status']}  ({out})")
    return 0 if report["status"] == "pass" else 1


def cmd_battery(args):
    try:
        configs = [apply_overrides(c, **_overrides(args)) for c in load_manifest(args.manifest)]
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    root = Path(args.out_dir)
    root.mkdir(parents=True, exist_ok=True)
    dirs = [root / c.get("name", f"scenario-{i}") for i, c in enumerate(configs)]
    if args.jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_execute, configs, dirs))
    else:
        reports = [_execute(c, d) for c, d in zip(configs, dirs)]
    summary = {"scenarios": {r["scenario"]: r for r in reports},
               "status": "pass" if all(r["status"] == "pass" for r in reports) else "fail"}
    with open(root / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    print(summary_table(reports))
    counts = {s: sum(r["status"] == s for r in reports) for s in ("pass", "fail", "error")}
    print(f"\n{len(reports)} scenarios: {counts['pass']} pass, {counts['fail']} fail, "
          f"{counts['error']} error")
    return 0 if summary["status"] == "pass" else 1


def cmd_report(args):
    root = Path(args.run_dir)
    if (root / "summary.json").exists():
        with open(root / "summary.json") as fh:
            reports = list(json.load(fh)["scenarios"].values())
    else:
        files = [root / "report.json"] if (root / "report.json").exists() else \
            sorted(root.glob("*/report.json"))
        if not files:
            print(f"error: no reports under {root}", file=sys.stderr)
            return 2
        reports = []
        for f in files:
            with open(f) as fh:
                reports.append(json.load(fh))
    print(summary_table(reports))
    return 0 if all(r["status"] == "pass" for r in reports) else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="wasserlab",
                                     description="Curvature checks along Wasserstein geodesics.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid-size", type=int)
    common.add_argument("--time-samples", type=int)
    common.add_argument("--tolerance", type=float)
    common.add_argument("--engine", choices=[e for e in ENGINES])
    common.add_argument("--out-dir", default="runs")
    common.add_argument("--w-sign", choices=["minus", "plus"])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", parents=[common], help="run one scenario")
    p.add_argument("config", help="config file or bundled scenario name")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("battery", parents=[common], help="run every scenario of a manifest")
    p.add_argument("manifest", help="manifest file or bundled manifest name (e.g. default)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_battery)
    p = sub.add_parser("report", help="re-render the summary of a run directory")
    p.add_argument("run_dir")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
