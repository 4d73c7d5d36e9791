#!/usr/bin/env python3
"""
Run catalog initialization script

Creates the catalog tables at DATABASE_URL. Recording is optional: runs are
only stored when FPFM_RECORD_RUNS is set or --record is passed to
scripts/run_scenario.py.

Usage:
    python scripts/init_db.py              # Create tables
    python scripts/init_db.py --reset      # Drop existing tables and recreate
"""

import sys
import os
import argparse

# Add the parent directory to Python path so we can import fpfm
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from fpfm.core.database import engine, create_tables, drop_tables
import fpfm.models  # noqa: F401  registers RunRecord with Base


def main():
    parser = argparse.ArgumentParser(description="Initialize the FPFM run catalog")
    parser.add_argument("--reset", action="store_true", help="Drop and recreate all tables")
    args = parser.parse_args()

    print("🚀 Initializing run catalog...")
    print(f"Database URL: {engine.url}")

    try:
        if args.reset:
            print("⚠️  Dropping existing tables...")
            drop_tables()
            print("✅ Tables dropped")

        print("📝 Creating catalog tables...")
        create_tables()
        print("✅ Catalog tables created successfully")

        print("\n🎉 Catalog initialization complete!")
        print("\nNext steps:")
        print("1. Record a run: python scripts/run_scenario.py figure3 --record")
        print("2. Browse the catalog: python -m fpfm.main")

    except Exception as e:
        print(f"❌ Catalog initialization failed: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
