import logging

import numpy as np

from omegalab.cli.dependencies import add_grid_arguments, add_output_arguments, require_x_grid
from omegalab.engine.crossover import asymptotic_correlator, classify_regime, crossover_exact, curve_zeros
from omegalab.schemas.run import RunConfig
from omegalab.storage import write_table

logger = logging.getLogger(__name__)

COLUMNS = ["x", "exact", "asymptotic", "ratio", "log_scale"]


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("crossover", parents=parents, help="Poisson to CUE crossover curve")
    add_grid_arguments(parser, "--x-range")
    add_output_arguments(parser)
    parser.add_argument("--n", type=int)
    parser.add_argument("--eps", type=float, required=True, help="crossover parameter eps = N * kernel time")
    parser.add_argument("--compare-asymptotic", action="store_true", help="add the large-N curve and the ratio")


def run(config: RunConfig) -> int:
    """
    Curva exacta del cruce y, opcionalmente, su forma asintótica.

    Ambas columnas se dan relativas a ``e^{log_scale}`` (la escala de la curva
    exacta), de modo que N grande no desborda.
    """
    require_x_grid(config, "crossover")
    n, eps = config.n, config.options["eps"]
    point = classify_regime(n, eps)
    exact = crossover_exact(n, eps, config.grid)
    xs = config.grid.points
    asymptotic = ratio = [None] * len(xs)
    metadata = {"n": n, "eps": eps, "regime": point.regime, "y_eps": point.y_eps,
                "zeros": curve_zeros(exact).tolist()}
    if config.options.get("compare_asymptotic"):
        approx = asymptotic_correlator(n, eps, config.grid)
        rescaled = np.real(approx.values) * np.exp(approx.log_scale - exact.log_scale)
        asymptotic = rescaled.tolist()
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = (np.real(exact.values) / rescaled).tolist()
    logger.info("crossover: N=%d eps=%g regime=%s", n, eps, point.regime)
    rows = [[float(x), float(np.real(v)), a, r, exact.log_scale]
            for x, v, a, r in zip(xs, exact.values, asymptotic, ratio)]
    write_table(COLUMNS, rows, config.output, config.format, command="crossover", metadata=metadata)
    return 0
