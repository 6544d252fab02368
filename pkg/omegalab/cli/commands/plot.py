from pathlib import Path

from omegalab.plotting import emit_plotscript
from omegalab.schemas.run import RunConfig


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("plot", parents=parents, help="write a matplotlib script for curve CSVs")
    parser.add_argument("files", nargs="*", help="curve CSV files")
    parser.add_argument("--style", default="default", help="matplotlib style sheet")
    parser.add_argument("--output", "-o", default="plot_omega.py", help="script to write")


def run(config: RunConfig) -> int:
    files = [Path(f) for f in config.options.get("files", [])]
    emit_plotscript(files, style=config.options.get("style", "default"), output=config.output)
    return 0
