import logging
import sys

from omegalab.cli.dependencies import add_output_arguments
from omegalab.schemas.run import RunConfig
from omegalab.storage import write_table
from omegalab.verify import run_suite

logger = logging.getLogger(__name__)

COLUMNS = ["check", "passed", "seconds", "detail"]


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("verify", parents=parents, help="cross-validation suite of all modules")
    add_output_arguments(parser)
    parser.add_argument("--level", choices=["quick", "full"], default="quick")
    parser.add_argument("--seed", type=int)


def run(config: RunConfig) -> int:
    """Sale con 1 si alguna comprobación falla y las enumera en stderr."""
    level = config.options.get("level", "quick")
    results = run_suite(level, config.seed)
    rows = [[r.name, r.passed, round(r.seconds, 3), r.detail] for r in results]
    write_table(COLUMNS, rows, config.output, config.format, command="verify",
                metadata={"level": level, "seed": config.seed})
    failed = [r for r in results if not r.passed]
    for result in failed:
        print(f"FAILED {result.name}: {result.detail}", file=sys.stderr)
    return 1 if failed else 0
