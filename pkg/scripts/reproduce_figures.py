"""Write curve data for every standard figure as CSV files.

    python3 scripts/reproduce_figures.py --out figures/ --trials 20000
"""
import argparse
import csv
import inspect
import time
from pathlib import Path

from leo_outage.figures import FIGURES


def write_rows(path: Path, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--trials", type=int, default=None, help="Monte-Carlo trials per point (figure default if omitted)")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--only", nargs="*", choices=sorted(FIGURES), help="subset of figures")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name in args.only or FIGURES:
        fn = FIGURES[name]
        params = inspect.signature(fn).parameters
        kwargs = {}
        if args.trials is not None and "trials" in params:
            kwargs["trials"] = args.trials
        if args.seed is not None and "seed" in params:
            kwargs["seed"] = args.seed
        t0 = time.perf_counter()
        rows = fn(**kwargs)
        write_rows(args.out / f"{name}.csv", rows)
        print(f"{name}: {len(rows)} rows in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
