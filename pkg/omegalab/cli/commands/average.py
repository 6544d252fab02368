import logging

import numpy as np

from omegalab.cli.dependencies import (
    add_grid_arguments, add_output_arguments, add_scheme_arguments, add_source_arguments, get_matrix, get_rng,
    matrix_label, require_x_grid,
)
from omegalab.core.errors import DomainError, SaddleDegeneracyError, SpectralGapError
from omegalab.engine.averaging import averaged_adjoint, ensemble_correlator, isotropic_correlator, v_saddle_correlator
from omegalab.engine.saddles import averaged_standard_saddles, gap_diagnostic, zirn_approximation
from omegalab.schemas.curve import CorrelatorCurve
from omegalab.schemas.run import RunConfig
from omegalab.storage import write_curve

logger = logging.getLogger(__name__)

FORMS = ["saddle", "zirn", "v-asymptotic"]


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("average", parents=parents, help="averaged Omega under a scheme")
    add_source_arguments(parser)
    add_grid_arguments(parser)
    add_output_arguments(parser)
    add_scheme_arguments(parser, ["basis", "isotropic", "semiclassical", "ensemble"])
    parser.add_argument("--n", type=int)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--form", choices=FORMS, default="saddle",
                        help="approximation used by the basis and semiclassical schemes")
    parser.add_argument("--include-cn", action="store_true")


def _saddle_curve(config: RunConfig, form: str) -> tuple[CorrelatorCurve, dict]:
    U = get_matrix(config)
    xs = require_x_grid(config, "average")
    include_cn = bool(config.options.get("include_cn"))
    if form == "v-asymptotic":
        if config.scheme.kind != "basis":
            raise DomainError("the v-asymptotic form belongs to the basis scheme")
        values = v_saddle_correlator(U, xs, include_cn=include_cn, mode="asymptotic")
        curve = CorrelatorCurve(grid=config.grid, n=U.n, values=np.asarray(values, dtype=complex),
                                route="v-asymptotic", scheme=config.scheme.label())
        return curve, {}

    rng = get_rng(config, stream_id=1) if config.seed is not None else None
    adjoint = averaged_adjoint(U, config.scheme, rng)
    gap, relevance = gap_diagnostic(adjoint)
    evaluate = averaged_standard_saddles if form == "saddle" else zirn_approximation
    values = np.full(len(xs), np.nan, dtype=complex)
    for k, x in enumerate(xs):
        try:
            values[k] = evaluate(adjoint, float(x), include_cn=include_cn)
        except SaddleDegeneracyError as exc:
            logger.warning("%s", exc.detail)
        except SpectralGapError as exc:
            raise SpectralGapError(f"{config.scheme.label()}: {exc.detail}; try --form saddle") from exc
    curve = CorrelatorCurve(grid=config.grid, n=U.n, values=values, route=form, scheme=config.scheme.label())
    extra = {"gap": gap, "relevance_sum": relevance, "max_stderr": adjoint.max_stderr()}
    return curve, extra


def run(config: RunConfig) -> int:
    """
    Ω promediado según ``--scheme``.

    isotropic y ensemble son exactos (o Monte Carlo para el ensemble con
    ``--samples``); basis y semiclassical pasan por ⟨Ad U⟩ y la forma de silla
    elegida con ``--form``.
    """
    scheme = config.scheme
    if scheme is None:
        raise DomainError("'average' needs --scheme")
    metadata = {"source": matrix_label(config), "seed": config.seed, "samples": config.samples}
    if scheme.kind == "ensemble":
        rng = get_rng(config) if config.samples is not None else None
        curve = ensemble_correlator(config.ensemble, config.n, config.grid, samples=config.samples, rng=rng)
    elif scheme.kind == "isotropic":
        curve = isotropic_correlator(get_matrix(config), scheme.epsilon, config.grid)
    else:
        curve, extra = _saddle_curve(config, config.options.get("form", "saddle"))
        metadata.update(extra)
    logger.info("average: %s, N=%d, %d points", scheme.label(), curve.n, len(curve.grid))
    write_curve(curve, config.output, config.format, command="average", metadata=metadata)
    return 0
