#!/usr/bin/env python3
"""
Check Recorded Runs Script

Quick report over the run catalog.

Usage:
    python scripts/check_runs.py              # Basic stats
    python scripts/check_runs.py --detailed   # Residuals and wall times per kind
    python scripts/check_runs.py --samples 5  # Show the latest runs
"""

import sys
import os
import argparse
from collections import Counter

# Add the parent directory to Python path so we can import fpfm
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from fpfm.core.database import catalog_session
from fpfm.models import RUN_KINDS, RunRecord


def print_basic_stats(db):
    total_runs = db.query(RunRecord).count()

    print("\n📊 RUN CATALOG STATISTICS")
    print("=" * 40)
    print(f"Total Runs: {total_runs}")

    if total_runs == 0:
        print("❌ No runs found in the catalog!")
        print("   Run: python scripts/run_scenario.py figure3 --record")
        return

    kinds = Counter(k for (k,) in db.query(RunRecord.kind).all())
    print("\n🧪 Kinds:")
    for kind, count in kinds.items():
        print(f"   • {kind}: {count} runs")

    statuses = Counter(s for (s,) in db.query(RunRecord.status).all())
    print("\n🚦 Statuses:")
    for status, count in statuses.items():
        marker = "✅" if status == "OK" else "❌"
        print(f"   {marker} {status}: {count} ({count / total_runs * 100:.1f}%)")


def print_detailed_stats(db):
    print_basic_stats(db)

    for kind in RUN_KINDS:
        runs = db.query(RunRecord).filter(RunRecord.kind == kind).all()
        if not runs:
            continue
        residuals = [r.max_residual for r in runs if r.max_residual is not None]
        wall_times = [r.wall_time_s for r in runs if r.wall_time_s is not None]
        print(f"\n🔬 {kind}:")
        if residuals:
            print(f"   • Worst residual: {max(residuals):.3e}")
        if wall_times:
            print(f"   • Average wall time: {sum(wall_times) / len(wall_times):.1f} s")


def show_latest_runs(db, count=5):
    runs = db.query(RunRecord).order_by(RunRecord.id.desc()).limit(count).all()

    print(f"\n🗂️  LATEST RUNS (showing {len(runs)} of {db.query(RunRecord).count()}):")
    print("=" * 60)
    for run in runs:
        marker = "✅" if run.passed else "❌"
        print(f"{marker} #{run.id} {run.name} [{run.kind}] {run.status}")
        print(f"   📁 {run.run_dir}")
        if run.max_residual is not None:
            print(f"   📉 max residual {run.max_residual:.3e}")


def main():
    parser = argparse.ArgumentParser(description="Report on recorded runs")
    parser.add_argument("--detailed", action="store_true", help="Per-kind residuals and wall times")
    parser.add_argument("--samples", type=int, default=0, help="Show the latest N runs")
    args = parser.parse_args()

    try:
        with catalog_session() as db:
            if args.detailed:
                print_detailed_stats(db)
            else:
                print_basic_stats(db)
            if args.samples:
                show_latest_runs(db, args.samples)
    except Exception as e:
        print(f"❌ Error reading the catalog: {e}")
        print("   Did you run: python scripts/init_db.py ?")
        sys.exit(1)


if __name__ == "__main__":
    main()
