"""Run every figure preset through the CLI and write its tables under an output directory.

    python3 scripts/reproduce_figures.py --outdir results --only fig1 fig7
"""

import argparse
import sys
import time
from pathlib import Path

from floquet_krylov import cli
from floquet_krylov.config import PRESET_COMMAND


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--outdir", default="results")
    parser.add_argument("--only", nargs="*", choices=sorted(PRESET_COMMAND), help="subset of presets")
    parser.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--force", action="store_true")
    args = parser.parse_args(argv)

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for name in args.only or PRESET_COMMAND:
        command = PRESET_COMMAND[name]
        target = outdir / f"{name}.{args.format}"
        cli_args = [command, "--preset", name, "--output", str(target), "--format", args.format,
                    "--workers", str(args.workers), "--seed", str(args.seed)]
        if args.force:
            cli_args.append("--force")
        start = time.perf_counter()
        code = cli.main(cli_args)
        print(f"{name:5s} {command:10s} exit={code} {time.perf_counter() - start:7.1f}s -> {target}")
        failures += code != 0
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
