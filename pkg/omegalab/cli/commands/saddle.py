import logging

from omegalab.cli.dependencies import (
    add_grid_arguments, add_output_arguments, add_scheme_arguments, add_source_arguments, get_matrix, get_rng,
    matrix_label,
)
from omegalab.core.errors import SaddleDegeneracyError, SpectralGapError
from omegalab.engine.averaging import averaged_adjoint
from omegalab.engine.saddles import averaged_standard_saddles, gap_diagnostic, standard_saddles, zirn_approximation
from omegalab.engine.unitary import eigenphases
from omegalab.schemas.run import RunConfig
from omegalab.storage import write_table

logger = logging.getLogger(__name__)

COLUMNS = ["x_or_gamma_re", "gamma_im", "plus_re", "plus_im", "minus_re", "minus_im", "averaged", "zirn"]


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("saddle", parents=parents, help="standard and averaged saddle contributions")
    add_source_arguments(parser)
    add_grid_arguments(parser)
    add_output_arguments(parser)
    add_scheme_arguments(parser, ["basis", "isotropic", "semiclassical"])
    parser.add_argument("--n", type=int)
    parser.add_argument("--samples", type=int, help="Monte Carlo samples of a sampled average")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--include-cn", action="store_true", help="multiply by the normalization constant C_N")


def run(config: RunConfig) -> int:
    """
    Contribuciones de las sillas estándar ±Σ₃ en cada punto y, con ``--scheme``,
    las versiones promediadas (exacta en ⟨Ad U⟩ y la forma de orden más bajo).

    Los puntos donde una contribución es singular (γ = 1 para las sillas
    estándar, x = 0 para las promediadas) quedan vacíos.
    """
    U = get_matrix(config)
    include_cn = bool(config.options.get("include_cn"))
    thetas = eigenphases(U)
    grid = config.grid
    metadata = {"source": matrix_label(config), "include_cn": include_cn}

    adjoint = None
    if config.scheme is not None:
        # stream 1: stream 0 may already have drawn the matrix
        rng = get_rng(config, stream_id=1) if config.seed is not None else None
        adjoint = averaged_adjoint(U, config.scheme, rng)
        gap, relevance = gap_diagnostic(adjoint)
        metadata.update(scheme=config.scheme.label(), gap=gap, relevance_sum=relevance)
        logger.info("saddle: averaged adjoint under %s, gap=%.4g, relevance sum=%.4g",
                    config.scheme.label(), gap, relevance)

    rows = []
    zirn_ok = True
    for point, gamma in zip(grid.points, grid.gammas(U.n)):
        if grid.mode == "x":
            row = [float(point), None]
        else:
            row = [float(point.real), float(point.imag)]
        try:
            plus, minus = standard_saddles(thetas, gamma)
            row += [plus.real, plus.imag, minus.real, minus.imag]
        except SaddleDegeneracyError as exc:
            logger.warning("%s", exc.detail)
            row += [None] * 4

        averaged = zirn = None
        if adjoint is not None and grid.mode == "x":
            x = float(point)
            try:
                averaged = averaged_standard_saddles(adjoint, x, include_cn=include_cn)
            except SaddleDegeneracyError as exc:
                logger.warning("%s", exc.detail)
            if zirn_ok:
                try:
                    zirn = zirn_approximation(adjoint, x, include_cn=include_cn)
                except SpectralGapError as exc:
                    logger.warning("%s", exc.detail)
                    zirn_ok = False
        rows.append(row + [averaged, zirn])

    write_table(COLUMNS, rows, config.output, config.format, command="saddle", metadata=metadata)
    return 0
