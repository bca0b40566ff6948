"""Render the light-cone figures through the command-line pipelines.

    python scripts/reproduce_figures.py [out_dir]

fig1: |<phi phi>| for an even cosine-bump velocity with constant K.
fig2a-c: Re <phi phi> for the square-root velocity with K ~ (1 - s^2)^alpha,
alpha = 0, 1/2, 1.  Each run writes CSV, JSON and SVG into its own folder.
"""
import sys
from pathlib import Path

from pwtransfer.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
FIGURES = ("fig1", "fig2a", "fig2b", "fig2c")


def run(out: Path) -> int:
    status = 0
    for name in FIGURES:
        print(f"[{name}] ", end="", flush=True)
        code = main(["--config", str(CONFIGS / f"{name}.ini"), "--out", str(out / name), "--svg"])
        status = max(status, code)
    return status


if __name__ == "__main__":
    sys.exit(run(Path(sys.argv[1] if len(sys.argv) > 1 else "out/figures")))
