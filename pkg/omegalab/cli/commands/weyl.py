import logging
from math import comb

from omegalab.cli.dependencies import (
    add_grid_arguments, add_output_arguments, add_source_arguments, get_matrix, matrix_label, require_x_grid,
)
from omegalab.core.errors import OracleScaleError
from omegalab.engine.weyl import weyl_sum, weyl_term_aggregates
from omegalab.schemas.run import RunConfig
from omegalab.storage import write_curve, write_table

logger = logging.getLogger(__name__)

TERM_COLUMNS = ["x", "p", "r", "count", "sum_re", "sum_im", "max_abs"]


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("weyl", parents=parents, help="sum over the C(2N,N) Weyl saddle points")
    add_source_arguments(parser)
    add_grid_arguments(parser)
    add_output_arguments(parser)
    parser.add_argument("--n", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--list-terms", action="store_true", help="dump per-(p, r) aggregates instead of the sum")
    parser.add_argument("--max-terms", type=int, help="refuse to enumerate more than this many configurations")
    parser.add_argument("--exact", choices=["auto", "never", "always"], default="auto",
                        help="exact integer summation of cancelling points")


def run(config: RunConfig) -> int:
    U = get_matrix(config)
    terms = comb(2 * U.n, U.n)
    max_terms = config.options.get("max_terms")
    if max_terms is not None and terms > max_terms:
        raise OracleScaleError(f"N={U.n} has {terms} saddle configurations, above --max-terms {max_terms}")

    metadata = {"source": matrix_label(config), "terms": terms}
    if config.options.get("list_terms"):
        rows = []
        for x in require_x_grid(config, "weyl --list-terms"):
            for group in weyl_term_aggregates(U, float(x)):
                total = group["sum"]
                rows.append([float(x), group["p"], group["r"], group["count"],
                             total.real, total.imag, group["max_abs"]])
        write_table(TERM_COLUMNS, rows, config.output, config.format, command="weyl", metadata=metadata)
        return 0

    curve = weyl_sum(U, config.grid, exact=config.options.get("exact", "auto"))
    logger.info("weyl: N=%d, %d configurations per point, %d points", U.n, terms, len(curve.grid))
    write_curve(curve, config.output, config.format, command="weyl", metadata=metadata)
    return 0
