import logging

from omegalab.cli.dependencies import (
    add_grid_arguments, add_output_arguments, add_source_arguments, get_matrix, matrix_label,
)
from omegalab.engine.loops import loop_constant, loop_corrections, wick_expectation
from omegalab.engine.unitary import adjoint_operator
from omegalab.schemas.run import RunConfig
from omegalab.storage import write_table

logger = logging.getLogger(__name__)

COLUMNS = ["x_or_gamma_re", "gamma_im", "expectation_re", "expectation_im",
           "correction_re", "correction_im", "constant"]


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("loops", parents=parents,
                                   help="one- and two-loop corrections around the standard saddle")
    add_source_arguments(parser)
    add_grid_arguments(parser)
    add_output_arguments(parser)
    parser.add_argument("--n", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--order", type=int, choices=[1, 2], default=1)


def run(config: RunConfig) -> int:
    """
    ⟨f⟩ y ⟨f⟩·Det(1 − T)^{−1} con T = γ·Ad U en cada punto de la rejilla.

    La columna ``constant`` es el valor independiente de T que debe reproducir ⟨f⟩.
    """
    U = get_matrix(config)
    order = config.options.get("order", 1)
    adjoint = adjoint_operator(U)
    constant = float(loop_constant(U.n, order))
    grid = config.grid
    rows = []
    for point, gamma in zip(grid.points, grid.gammas(U.n)):
        T = gamma * adjoint
        expectation = wick_expectation(T, order)
        correction = loop_corrections(T, order)
        first, second = (float(point), None) if grid.mode == "x" else (float(point.real), float(point.imag))
        rows.append([first, second, expectation.real, expectation.imag, correction.real, correction.imag, constant])
    worst = max(abs(complex(r[2], r[3]) - constant) for r in rows)
    logger.info("loops: N=%d order=%d, max |<f> - constant| = %.3e", U.n, order, worst)
    write_table(COLUMNS, rows, config.output, config.format, command="loops",
                metadata={"source": matrix_label(config), "order": order, "constant": constant})
    return 0
