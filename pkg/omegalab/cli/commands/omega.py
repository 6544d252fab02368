import logging

import numpy as np

from omegalab.cli.dependencies import (
    add_grid_arguments, add_output_arguments, add_source_arguments, get_matrix, get_rng, matrix_label,
)
from omegalab.engine.averaging import ensemble_correlator
from omegalab.engine.correlator import omega_character, omega_quadrature, omega_secular
from omegalab.engine.fock import build_basis, character_trace
from omegalab.engine.weyl import weyl_sum
from omegalab.schemas.curve import CorrelatorCurve
from omegalab.schemas.run import RunConfig
from omegalab.storage import write_curve

logger = logging.getLogger(__name__)

ROUTES = ["secular", "character", "quadrature", "fock", "weyl"]


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("omega", parents=parents, help="evaluate Omega_U on a grid")
    add_source_arguments(parser)
    add_grid_arguments(parser)
    add_output_arguments(parser)
    parser.add_argument("--n", type=int, help="dimension for --ensemble and --map")
    parser.add_argument("--route", choices=ROUTES, default="secular", help="exact route for a single matrix")
    parser.add_argument("--samples", type=int, help="ensemble Monte Carlo samples (analytic average when omitted)")
    parser.add_argument("--seed", type=int)


def _single_matrix(config: RunConfig) -> CorrelatorCurve:
    U = get_matrix(config)
    route = config.options.get("route", "secular")
    grid = config.grid
    if route == "secular":
        return omega_secular(U, grid)
    if route == "character":
        return omega_character(U, grid)
    if route == "weyl":
        return weyl_sum(U, grid)
    gammas = grid.gammas(U.n)
    if route == "quadrature":
        values = np.array([omega_quadrature(U, g) for g in gammas])
    else:
        basis = build_basis(U.n)
        values = np.array([character_trace(U, g, basis) for g in gammas])
    return CorrelatorCurve(grid=grid, n=U.n, values=values, route=route)


def run(config: RunConfig) -> int:
    """
    Calcula Ω sobre la rejilla por la ruta pedida.

    Con ``--ensemble`` el resultado es el promedio sobre el ensemble: analítico
    sin ``--samples``, Monte Carlo con él.
    """
    if config.ensemble_average():
        rng = get_rng(config) if config.samples is not None else None
        curve = ensemble_correlator(config.ensemble, config.n, config.grid, samples=config.samples, rng=rng)
    else:
        curve = _single_matrix(config)
    logger.info("omega: N=%d route=%s points=%d", curve.n, curve.route, len(curve.grid))
    metadata = {"source": matrix_label(config), "seed": config.seed, "samples": config.samples}
    write_curve(curve, config.output, config.format, command="omega", metadata=metadata)
    return 0
