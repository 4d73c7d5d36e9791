#!/usr/bin/env python3
"""
Scenario runner script

Runs one of the canonical experiments and writes a run directory with CSV
tables, optional legacy-VTK snapshots and summary.json.

Usage Examples:
    python scripts/run_scenario.py fpfm --config configs/uniform_stretch.json
    python scripts/run_scenario.py fpfm --config configs/strip.json --seed-check
    python scripts/run_scenario.py figure3 --alphas 0.01 0.05 0.1 0.2 --dt 1e-4
    python scripts/run_scenario.py travelwave --config configs/travelwave.json --workers 4
"""

import sys
import os
import json
import argparse
from datetime import datetime
from pathlib import Path

# Add the parent directory to Python path so we can import fpfm
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from fpfm.core import settings
from fpfm.core.errors import FPFMError
from fpfm.core.params import load_config
from fpfm.scenarios import (
    load_travelwave_spec,
    run_figure3,
    run_fpfm,
    run_seed_checks,
    run_traveling_wave,
    strip_config,
)
from fpfm.scenarios.figure3 import DEFAULT_ALPHAS


def print_banner(command: str):
    print("\n" + "=" * 60)
    print("🧊 FRACTURE PHASE-FIELD SCENARIO RUNNER")
    print("=" * 60)
    print(f"Scenario: {command}")
    print(f"Started at: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    print("=" * 60)


def print_checks(results) -> bool:
    print("\n🔍 SEED CHECKS:")
    print("-" * 40)
    for r in results:
        print(f"{'✅' if r.passed else '❌'} {r.name}: {r.detail}")
    return all(r.passed for r in results)


def command_fpfm(args):
    config = load_config(args.config)
    if args.seed_check and not print_checks(run_seed_checks(config)):
        return 1
    result = run_fpfm(config, args.out, record=args.record, verbose=True)
    return 0 if result.ok else 1


def command_figure3(args):
    if args.config:
        document = json.loads(Path(args.config).read_text(encoding="utf-8"))
        alphas = document.get("alphas", DEFAULT_ALPHAS)
        dt = document.get("dt", args.dt)
        l0 = document.get("l0", args.l0)
    else:
        alphas, dt, l0 = args.alphas, args.dt, args.l0
    result = run_figure3(alphas, dt, l0, args.out, record=args.record, verbose=True)
    for curve in result.summary["curves"]:
        print(f"   α={curve['alpha']:g}: L(end)={curve['final_length']:.4f}, "
              f"jump fraction={curve['jump_fraction']:.3f}, residual={curve['max_abs_residual']:.2e}")
    return 0 if result.ok else 1


def command_travelwave(args):
    spec = load_travelwave_spec(args.config)
    if args.seed_check:
        config = strip_config(spec, spec.stretches[0], spec.alphas[0])
        if not print_checks(run_seed_checks(config)):
            return 1
    result = run_traveling_wave(spec, args.out, workers=args.workers, record=args.record, verbose=True)
    for fit in result.summary["fits"]:
        if "slope" in fit:
            print(f"   α={fit['alpha']:g}: G_c^ε ≈ {fit['intercept']:.4f} + {fit['slope']:.4f}·V "
                  f"(αβ̄ = {fit['predicted_slope']:.4f}, {fit['n_points']} points)")
        else:
            print(f"   α={fit['alpha']:g}: not enough steady runs to fit ({fit['n_points']})")
    return 0 if result.ok else 1


def build_parser():
    parser = argparse.ArgumentParser(description="Run fracture phase-field scenarios")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="Logging level (default: FPFM_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required):
        p.add_argument("--config", required=config_required, help="Scenario JSON document")
        p.add_argument("--out", default=None, help="Run directory (default: FPFM_OUTPUT_DIR/<name>)")
        p.add_argument("--seed-check", action="store_true", help="Run the invariant suite first")
        p.add_argument("--record", action="store_true", default=None, help="Store the run in the catalog")

    p = sub.add_parser("fpfm", help="Coupled phase-field simulation")
    common(p, True)
    p.set_defaults(handler=command_fpfm)

    p = sub.add_parser("figure3", help="Griffith ODE curves for several rate coefficients")
    common(p, False)
    p.add_argument("--alphas", type=float, nargs="+", default=list(DEFAULT_ALPHAS))
    p.add_argument("--dt", type=float, default=1e-4)
    p.add_argument("--l0", type=float, default=0.0)
    p.set_defaults(handler=command_figure3)

    p = sub.add_parser("travelwave", help="Traveling-wave sweep on a strip")
    common(p, True)
    p.add_argument("--workers", type=int, default=None, help="Process-pool size (default: FPFM_WORKERS)")
    p.set_defaults(handler=command_travelwave)

    return parser


def main():
    args = build_parser().parse_args()
    settings.configure_logging(args.log_level.upper())
    print_banner(args.command)

    try:
        sys.exit(args.handler(args))
    except FPFMError as e:
        print(f"❌ {type(e).__name__}: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
