"""Command line entry point: ``syncnet run|list|sweep``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import runner

OUT_ENV = "SYNCNET_OUT"


def _out_dir(arg: str | None, name: str) -> Path:
    if arg:
        return Path(arg)
    base = os.environ.get(OUT_ENV, "runs")
    return Path(base) / name


def cmd_list(args) -> int:
    for name in runner.builtin_names():
        cfg = runner.load_builtin(name)
        print(f"{name:26s} {cfg.get('description', '')}")
    return 0


def cmd_run(args) -> int:
    cfg = runner.load_config(args.scenario)
    out = _out_dir(args.out, cfg.get("name", "scenario"))
    summary = runner.run_config(cfg, out, seed=args.seed)
    print(json.dumps(runner._clean(summary["result"]), indent=2, sort_keys=True))
    print(f"artifacts written to {out}", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    cfg = runner.load_config(args.scenario)
    if args.seed is not None:
        cfg["seed"] = args.seed
    runner.validate(cfg)
    out = _out_dir(args.out, f"{cfg['name']}-sweep")
    rows = runner.run_sweep(cfg, args.param, runner.parse_range(args.range), out)
    for r in rows:
        print(json.dumps(runner._clean({k: v for k, v in r.items()})))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="syncnet", description="Networked oscillator scenarios.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run a built-in scenario, scenario file or manifest")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV}/<name> or runs/<name>)")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("list", help="list built-in scenarios")
    p.set_defaults(func=cmd_list)
    p = sub.add_parser("sweep", help="run a scenario over a parameter range")
    p.add_argument("scenario")
    p.add_argument("--param", required=True, help="r1, r2 or a dotted config path such as params.control.Delta")
    p.add_argument("--range", required=True, help="start:stop:step (inclusive) or a comma list")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except runner.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
