import logging
from math import comb

from omegalab.cli.dependencies import add_output_arguments
from omegalab.engine.geometry import expected_manifold_count, manifold_census
from omegalab.schemas.run import RunConfig
from omegalab.storage import write_table

logger = logging.getLogger(__name__)

COLUMNS = ["p", "r", "volume", "points"]


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("census", parents=parents, help="critical submanifolds (p, r): volumes and points")
    add_output_arguments(parser)
    parser.add_argument("--n", type=int)


def run(config: RunConfig) -> int:
    census = manifold_census(config.n)
    logger.info("census: N=%d, %d manifolds (closed form %d), %d points (C(2N,N) = %d)",
                census.n, census.count, expected_manifold_count(census.n),
                census.total_points, comb(2 * census.n, census.n))
    rows = [[c.p, c.r, c.volume, c.points] for c in census.classes]
    metadata = {"n": census.n, "count": census.count, "total_points": census.total_points}
    write_table(COLUMNS, rows, config.output, config.format, command="census", metadata=metadata)
    return 0
