"""
Dependencias compartidas por los subcomandos: lectura de rejillas, fuente de
la matriz y flujo aleatorio.
"""
import argparse
import logging
from pathlib import Path
from typing import Optional

import numpy as np

from omegalab.core.config import settings
from omegalab.core.errors import StorageError
from omegalab.engine.averaging import default_generators
from omegalab.engine.unitary import fourier_matrix, haar_sample, kicked_map, make_unitary, poisson_sample
from omegalab.schemas.averaging import AveragingScheme
from omegalab.schemas.curve import GammaGrid
from omegalab.schemas.matrix import RngStream, UnitaryMatrix
from omegalab.schemas.run import MapSpec, RunConfig
from omegalab.storage import read_generators, read_matrix

logger = logging.getLogger(__name__)


def parse_range(text: str) -> GammaGrid:
    """
    Convierte "a:b:steps" en una rejilla x de ``steps`` puntos entre a y b (incluidos).

    Raises:
        argparse.ArgumentTypeError: si el texto no tiene la forma esperada.
    """
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return GammaGrid.from_x([float(parts[0])])
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except (ValueError, IndexError) as exc:
        raise argparse.ArgumentTypeError(f"expected a:b:steps or a single x, got {text!r}") from exc
    if len(parts) != 3 or steps < 1:
        raise argparse.ArgumentTypeError(f"expected a:b:steps with steps >= 1, got {text!r}")
    return GammaGrid.x_range(start, stop, steps)


def parse_gammas(text: str) -> GammaGrid:
    """Lista separada por comas de γ complejos en notación de Python, p. ej. "0.9,1+0.2j"."""
    try:
        values = [complex(item.replace(" ", "")) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot read complex values from {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty gamma list")
    return GammaGrid.from_gamma(values)


def parse_map(text: str) -> MapSpec:
    try:
        return MapSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad map spec {text!r}: {exc}") from exc


def get_rng(config: RunConfig, stream_id: int = 0) -> RngStream:
    seed = settings.DEFAULT_SEED if config.seed is None else config.seed
    return RngStream(seed=seed, stream_id=stream_id)


def get_matrix(config: RunConfig) -> UnitaryMatrix:
    """
    Resuelve la única fuente de matriz de la configuración.

    Un ensemble aquí significa *una* matriz sorteada con la semilla dada; el
    promedio sobre el ensemble lo hacen los comandos que lo admiten.
    """
    if config.matrix_file is not None:
        matrix = read_matrix(config.matrix_file, tol=config.unitary_tol)
        if config.n is not None and config.n != matrix.n:
            raise StorageError(f"--n {config.n} does not match the {matrix.n}x{matrix.n} matrix in {config.matrix_file}")
        return matrix
    if config.builtin_map is not None:
        if config.builtin_map.kind == "fourier":
            return make_unitary(fourier_matrix(config.n))
        return kicked_map(config.n, config.builtin_map.kicks)
    if config.ensemble == "cue":
        return haar_sample(config.n, get_rng(config))
    if config.ensemble == "poisson":
        return poisson_sample(config.n, get_rng(config))
    raise StorageError("no matrix source configured")


def matrix_label(config: RunConfig) -> Optional[str]:
    if config.matrix_file is not None:
        return str(config.matrix_file)
    if config.builtin_map is not None:
        kicks = ",".join(f"{k:g}" for k in config.builtin_map.kicks)
        return f"{config.builtin_map.kind}:{kicks}" if kicks else config.builtin_map.kind
    if config.ensemble is not None:
        return f"{config.ensemble}(seed={config.seed})"
    return None


def require_x_grid(config: RunConfig, command: str) -> np.ndarray:
    if config.grid.mode != "x":
        raise StorageError(f"'{command}' works on real x grids; use --x a:b:steps")
    return config.grid.points


def add_source_arguments(parser: argparse.ArgumentParser) -> None:
    source = parser.add_argument_group("matrix source (exactly one)")
    source.add_argument("--input", dest="matrix_file", help="matrix JSON file {n, re, im}")
    source.add_argument("--ensemble", choices=["cue", "poisson"], help="random ensemble")
    source.add_argument("--map", dest="builtin_map", type=parse_map, help="builtin map: fourier | kicked:k1,k2,...")
    parser.add_argument("--unitary-tol", type=float, help="unitarity tolerance of the file reader")


def add_grid_arguments(parser: argparse.ArgumentParser, *aliases: str) -> None:
    grid = parser.add_mutually_exclusive_group()
    grid.add_argument("--x", *aliases, dest="grid", type=parse_range, help="x grid a:b:steps (gamma = e^{ix/N})")
    grid.add_argument("--gamma", dest="grid", type=parse_gammas, help="comma separated complex gamma values")


def add_output_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", "-o", help="output file (stdout when omitted)")
    parser.add_argument("--format", choices=["csv", "json"], default="csv")


def add_scheme_arguments(parser: argparse.ArgumentParser, choices: list[str]) -> None:
    scheme = parser.add_argument_group("averaging scheme")
    scheme.add_argument("--scheme", choices=choices)
    scheme.add_argument("--epsilon", type=float, help="heat-kernel time (isotropic scheme)")
    scheme.add_argument("--width", type=float, help="Gaussian width of the semiclassical kicks")
    scheme.add_argument("--generators", help="JSON list of Hermitian matrices (semiclassical scheme)")


def scheme_from_args(args: argparse.Namespace) -> Optional[AveragingScheme]:
    """
    Construye el esquema de promedio a partir de los argumentos.

    Sin ``--generators`` el esquema semiclásico usa los generadores de
    posición y momento de dimensión N.
    """
    kind = getattr(args, "scheme", None)
    if kind is None:
        return None
    generators = None
    if kind == "semiclassical":
        if args.generators:
            generators = read_generators(Path(args.generators))
        else:
            n = args.n
            if n is None and args.matrix_file:
                n = read_matrix(Path(args.matrix_file), tol=args.unitary_tol).n
            if n is None:
                raise StorageError("the semiclassical scheme needs --generators or --n")
            generators = default_generators(n)
    return AveragingScheme(
        kind=kind,
        epsilon=args.epsilon,
        width=args.width,
        samples=args.samples if kind in {"basis", "semiclassical", "ensemble"} else None,
        generators=generators,
        ensemble=args.ensemble if kind == "ensemble" else None,
    )
