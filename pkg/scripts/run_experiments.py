"""Run experiment configs and write their CSV/JSON reports.

    python scripts/run_experiments.py                 # every config in scripts/configs
    python scripts/run_experiments.py wong_zakai support
    python scripts/run_experiments.py --out /tmp/results adapted
"""

import argparse
import os
import sys
import time
from pathlib import Path

from hrp.experiments import load_config, run_config, write_report

CONFIGS = Path(__file__).resolve().parent / "configs"


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("names", nargs="*", help="config names (default: all)")
    ap.add_argument("--out", default=None, help="directory for reports (default: output field of each config)")
    args = ap.parse_args(argv)

    names = args.names or sorted(p.stem for p in CONFIGS.glob("*.yaml"))
    failed = []
    for name in names:
        cfg = load_config(CONFIGS / f"{name}.yaml")
        output = os.path.join(args.out, cfg.name) if args.out else cfg.output
        start = time.perf_counter()
        report = run_config(cfg)
        csv_path, json_path = write_report(report, output)
        for flag, ok in report.passed.items():
            print(f"{'PASS' if ok else 'FAIL'} {name}.{flag}")
        print(f"  {csv_path}, {json_path} ({time.perf_counter() - start:.0f} s)")
        if not report.ok:
            failed.append(name)
    if failed:
        print("failing flags in: " + ", ".join(failed))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
