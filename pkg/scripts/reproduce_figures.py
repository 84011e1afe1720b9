"""Run every figure preset plus the validation report into one directory.

    python scripts/reproduce_figures.py --out results --workers 4
"""

import argparse
import sys
import time
from pathlib import Path

from pinchlink.cli import main as cli_main
from pinchlink.experiment import PRESETS


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--config", type=Path)
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-mc", action="store_true")
    args = p.parse_args(argv)

    common = ["--out", str(args.out), "--workers", str(args.workers)]
    if args.config:
        common += ["--config", str(args.config)]
    if args.trials:
        common += ["--trials", str(args.trials)]
    if args.no_mc:
        common.append("--no-mc")

    for name in PRESETS:
        t0 = time.perf_counter()
        code = cli_main(["sweep", "--preset", name, *common])
        print(f"{name}: exit {code} in {time.perf_counter() - t0:.1f} s")
        if code:
            return code
    extra = ["--config", str(args.config)] if args.config else []
    return cli_main(["validate", "--out", str(args.out), *extra])


if __name__ == "__main__":
    sys.exit(main())
