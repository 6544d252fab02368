import logging
import numpy as np

from omegalab.cli.dependencies import add_output_arguments, get_rng
from omegalab.engine.correlator import omega_secular
from omegalab.engine.fock import build_basis, character_trace, expected_laplacian_spectrum, laplacian_spectrum
from omegalab.engine.unitary import haar_sample
from omegalab.schemas.curve import GammaGrid
from omegalab.schemas.run import RunConfig
from omegalab.storage import write_table

logger = logging.getLogger(__name__)

COLUMNS = ["n", "dim_f", "eigenvalue", "multiplicity", "expected", "max_route_deviation"]

# puntos de prueba dentro, sobre y fuera del círculo unidad
CHECK_GAMMAS = [0.7, np.exp(0.9j), 1.3 * np.exp(-0.4j), -0.5 + 0.2j]


def route_deviation(n: int, trials: int, config: RunConfig) -> float:
    """Máxima desviación relativa entre la traza de Fock y la ruta secular sobre matrices de Haar."""
    basis = build_basis(n)
    grid = GammaGrid.from_gamma(CHECK_GAMMAS)
    worst = 0.0
    for trial in range(trials):
        U = haar_sample(n, get_rng(config, stream_id=trial))
        exact = omega_secular(U, grid).values
        for gamma, value in zip(CHECK_GAMMAS, exact):
            fock = character_trace(U, gamma, basis)
            worst = max(worst, abs(fock - value) / max(1.0, abs(value)))
    return worst


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("fock-check", parents=parents,
                                   help="Fock-space oracle: Laplacian spectrum and route agreement")
    add_output_arguments(parser)
    parser.add_argument("--n", type=int)
    parser.add_argument("--trials", type=int, default=5, help="random matrices compared against the secular route")
    parser.add_argument("--seed", type=int)


def run(config: RunConfig) -> int:
    n = config.n
    basis = build_basis(n)
    spectrum = laplacian_spectrum(basis)
    expected = expected_laplacian_spectrum(n)
    deviation = route_deviation(n, config.options.get("trials", 5), config)
    logger.info("fock-check: N=%d dim F=%d, max route deviation %.3e", n, basis.dim, deviation)
    rows = [[n, basis.dim, value, spectrum.get(value, 0), expected.get(value, 0), deviation]
            for value in sorted(set(spectrum) | set(expected))]
    write_table(COLUMNS, rows, config.output, config.format, command="fock-check",
                metadata={"n": n, "dim_f": basis.dim})
    return 0
