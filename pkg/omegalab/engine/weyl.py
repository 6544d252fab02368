"""
Weyl saddle sum: enumeration of the C(2N,N) saddle configurations, the term
of each configuration, and their compensated sum.

With z = (γe^{iθ_1..N}, e^{iθ_1..N}) the term of S is

    ∏_{μ∈S̄₁} z_μ · ∏_{ν∈S̃₂} z_ν^{−1} / ∏_{μ∈S, ν∉S} (1 − z_μ/z_ν)

where S̄₁ = {1..N}∖S and S̃₂ = S ∩ {N+1..2N}; γ^{−N/2} Σ_S term(S) = Ω_U(γ).
"""
import logging
from collections import Counter, defaultdict
from functools import reduce
from itertools import combinations, islice
from math import comb
from typing import Iterator, Literal

import numpy as np
from joblib import Parallel, delayed

from omegalab.core.config import settings
from omegalab.core.errors import OracleScaleError, WeylPoleError
from omegalab.engine.summation import CompensatedSum
from omegalab.engine.unitary import eigenphases
from omegalab.schemas.curve import CorrelatorCurve, GammaGrid
from omegalab.schemas.matrix import EigenphaseSpectrum, UnitaryMatrix
from omegalab.schemas.saddle import PhiSpectrum, SubsetConfig

logger = logging.getLogger(__name__)

_LOG_SPACE_ABOVE_N = 8


def enumerate_configs(n: int) -> Iterator[SubsetConfig]:
    """All N-subsets of {1..2N} in lexicographic order."""
    if n > settings.WEYL_MAX_N:
        raise OracleScaleError(f"Weyl enumeration capped at N={settings.WEYL_MAX_N}, got N={n}")
    for subset in combinations(range(1, 2 * n + 1), n):
        yield SubsetConfig(n=n, subset=subset)


def config_class_counts(n: int) -> dict[tuple[int, int], int]:
    """Number of configurations per (p, r), by enumeration."""
    return dict(Counter((cfg.p, cfg.r) for cfg in enumerate_configs(n)))


def pair_partner(cfg: SubsetConfig) -> SubsetConfig:
    """Particle-hole partner (p → N − p): the complement of S."""
    return SubsetConfig(n=cfg.n, subset=cfg.complement())


def phi_spectrum(thetas: EigenphaseSpectrum | np.ndarray, log_gamma: complex) -> PhiSpectrum:
    """φ = (θ + x/N, θ) with x/N = −i log γ."""
    thetas = np.asarray(thetas.thetas if isinstance(thetas, EigenphaseSpectrum) else thetas, dtype=float)
    shift = -1j * complex(log_gamma)
    if shift.imag == 0:
        shift = shift.real
    return PhiSpectrum(phis=np.concatenate([thetas + shift, thetas]))


def _factor_matrix(z: np.ndarray) -> np.ndarray:
    return 1 - z[:, None] / z[None, :]


def _check_collisions(factors: np.ndarray, rows, cols) -> None:
    sub = np.abs(factors[np.ix_(rows, cols)])
    if sub.size and sub.min() < settings.DEGENERACY_TOL:
        i, j = np.unravel_index(np.argmin(sub), sub.shape)
        raise WeylPoleError(
            f"pole in Weyl term: phases {rows[i] + 1} and {cols[j] + 1} collide (|1 - z/z'| = {sub[i, j]:.2e})"
        )


def weyl_term(cfg: SubsetConfig, phis: PhiSpectrum) -> complex:
    if cfg.n != phis.n:
        raise ValueError(f"config N={cfg.n} does not match phase spectrum N={phis.n}")
    n = cfg.n
    z = phis.z()
    inside = [s - 1 for s in cfg.subset]
    outside = [s - 1 for s in cfg.complement()]
    factors = _factor_matrix(z)
    _check_collisions(factors, inside, outside)

    numerator = np.prod([z[m] for m in outside if m < n]) * np.prod([1 / z[m] for m in inside if m >= n])
    return complex(numerator / np.prod(factors[np.ix_(inside, outside)]))


def _chunk_terms(inside: np.ndarray, outside: np.ndarray, z: np.ndarray, log_space: bool) -> np.ndarray:
    """Terms for a block of subsets given as 0-based index arrays of shape (K, N)."""
    n = inside.shape[1]
    factors = _factor_matrix(z)
    out_weight = np.where(np.arange(2 * n) < n, z, 1.0)
    in_weight = np.where(np.arange(2 * n) >= n, 1 / z, 1.0)
    gathered = factors[inside[:, :, None], outside[:, None, :]].reshape(len(inside), -1)
    if log_space:
        log_terms = (np.sum(np.log(out_weight)[outside], axis=1)
                     + np.sum(np.log(in_weight)[inside], axis=1)
                     - np.sum(np.log(gathered), axis=1))
        return np.exp(log_terms)
    numerator = np.prod(out_weight[outside], axis=1) * np.prod(in_weight[inside], axis=1)
    return numerator / np.prod(gathered, axis=1)


def _subset_chunks(n: int, size: int) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    everything = np.arange(2 * n)
    stream = combinations(range(2 * n), n)
    while True:
        block = list(islice(stream, size))
        if not block:
            return
        inside = np.array(block, dtype=np.intp)
        mask = np.ones((len(block), 2 * n), dtype=bool)
        mask[np.arange(len(block))[:, None], inside] = False
        outside = np.broadcast_to(everything, mask.shape)[mask].reshape(len(block), n)
        yield inside, outside


def _sum_chunk(chunk, zs: list[np.ndarray], log_space: bool) -> list[tuple[CompensatedSum, float]]:
    inside, outside = chunk
    sums = []
    for z in zs:
        terms = _chunk_terms(inside, outside, z, log_space)
        acc = CompensatedSum()
        acc.add_many(terms)
        sums.append((acc, float(np.max(np.abs(terms)))))
    return sums


def _gaussian_mul(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


def _gaussian_prod(values) -> tuple[int, int]:
    return reduce(_gaussian_mul, values, (1, 0))


def exact_weyl_total(z: np.ndarray) -> complex:
    """
    Σ_S term(S) in exact Gaussian-integer arithmetic.

    z is rounded to a grid of spacing 2^{−64}·max|z| and every term is brought
    over the common denominator ∏_{b>N} z_b · ∏_{μ<ν}(z_ν − z_μ). The terms
    are homogeneous of degree 0 in z, so the scaled integers can be used
    directly, and the only rounding is the final division.
    """
    n = len(z) // 2
    _, exponent = np.frexp(np.max(np.abs(z)))
    scale = 2.0 ** (64 - int(exponent))
    w = [(int(np.rint(v.real * scale)), int(np.rint(v.imag * scale))) for v in z]
    diff = {(a, b): (w[b][0] - w[a][0], w[b][1] - w[a][1]) for a, b in combinations(range(2 * n), 2)}
    for (a, b), d in diff.items():
        if d == (0, 0):
            raise WeylPoleError(f"pole in Weyl term: phases {a + 1} and {b + 1} collide")
    powers = [_gaussian_prod([wv] * n) for wv in w]

    re, im = 0, 0
    for inside in combinations(range(2 * n), n):
        chosen = set(inside)
        outside = [m for m in range(2 * n) if m not in chosen]
        factors = [w[m] for m in outside if m < n]
        factors += [powers[m] for m in outside]
        factors += [w[m] for m in outside if m >= n]
        factors += [diff[pair] for pair in combinations(inside, 2)]
        factors += [diff[pair] for pair in combinations(outside, 2)]
        term = _gaussian_prod(factors)
        # orientation of the split pairs relative to the Vandermonde product
        if (sum(inside) - n * (n - 1) // 2) % 2:
            re, im = re - term[0], im - term[1]
        else:
            re, im = re + term[0], im + term[1]

    dr, di = _gaussian_prod([w[m] for m in range(n, 2 * n)] + list(diff.values()))
    norm = dr * dr + di * di
    return complex((re * dr + im * di) / norm, (im * dr - re * di) / norm)


def _accumulate(zs: list[np.ndarray], n: int, workers: int) -> tuple[np.ndarray, np.ndarray]:
    """Compensated double-precision totals and the largest |term| per point."""
    log_space = n > _LOG_SPACE_ABOVE_N
    logger.debug("weyl sum N=%d terms=%d points=%d workers=%d log_space=%s",
                 n, comb(2 * n, n), len(zs), workers, log_space)
    totals = [CompensatedSum() for _ in zs]
    largest = np.zeros(len(zs))

    # results come back in chunk order whatever the number of workers
    partials = Parallel(n_jobs=workers, prefer="threads", return_as="generator")(
        delayed(_sum_chunk)(chunk, zs, log_space) for chunk in _subset_chunks(n, settings.WEYL_CHUNK_SIZE)
    )
    for parts in partials:
        for k, (part, biggest) in enumerate(parts):
            totals[k].merge(part)
            largest[k] = max(largest[k], biggest)
    return np.array([t.value for t in totals]), largest


def _prepared_phases(U: UnitaryMatrix, grid: GammaGrid) -> tuple[np.ndarray, list[np.ndarray]]:
    n = U.n
    if n > settings.WEYL_MAX_N:
        raise OracleScaleError(f"Weyl enumeration capped at N={settings.WEYL_MAX_N}, got N={n}")
    thetas = eigenphases(U).thetas
    log_gammas = grid.log_gammas(n)
    zs = [phi_spectrum(thetas, lg).z() for lg in log_gammas]
    everything = list(range(2 * n))
    for z in zs:
        _check_collisions(_factor_matrix(z) + np.eye(2 * n), everything, everything)
    return log_gammas, zs


def weyl_sum(U: UnitaryMatrix, grid: GammaGrid, workers: int | None = None,
             exact: Literal["auto", "never", "always"] = "auto") -> CorrelatorCurve:
    """
    γ^{−N/2} Σ_S term(S) on every grid point, without the C_N prefactor.

    Subsets are split into fixed-size chunks, each summed with a private
    compensated accumulator (terms sorted by descending magnitude); chunk
    partials are merged in lexicographic chunk order, so the result does not
    depend on the worker count.

    Near γ = 1 the terms grow like x^{−N} while the sum stays O(Ω), and the
    rounding of each term is beyond what any summation order repairs. With
    ``exact="auto"`` a point whose largest term exceeds
    ``settings.WEYL_EXACT_RATIO`` times the total is recomputed by
    ``exact_weyl_total``.
    """
    n = U.n
    workers = workers or settings.THREADS
    log_gammas, zs = _prepared_phases(U, grid)

    if exact == "always":
        totals = np.array([exact_weyl_total(z) for z in zs])
    else:
        totals, largest = _accumulate(zs, n, workers)
        if exact == "auto":
            cancelling = largest > settings.WEYL_EXACT_RATIO * np.abs(totals)
            if np.any(cancelling):
                logger.info("weyl sum: %d of %d points cancel beyond double precision, summing exactly",
                            int(np.sum(cancelling)), len(zs))
            for k in np.flatnonzero(cancelling):
                totals[k] = exact_weyl_total(zs[k])

    values = totals * np.exp(-0.5 * n * log_gammas)
    return CorrelatorCurve(grid=grid, n=n, values=values, route="weyl")


def weyl_max_terms(U: UnitaryMatrix, grid: GammaGrid, workers: int | None = None) -> np.ndarray:
    """max_S |γ^{−N/2} term(S)| per grid point."""
    log_gammas, zs = _prepared_phases(U, grid)
    _, largest = _accumulate(zs, U.n, workers or settings.THREADS)
    return largest * np.abs(np.exp(-0.5 * U.n * log_gammas))


def weyl_term_aggregates(U: UnitaryMatrix, x: float) -> list[dict]:
    """Per-(p, r) totals of γ^{−N/2}·term(S) at γ = e^{ix/N}."""
    n = U.n
    phis = phi_spectrum(eigenphases(U), 1j * x / n)
    prefactor = np.exp(-0.5j * x)
    groups: dict[tuple[int, int], CompensatedSum] = defaultdict(CompensatedSum)
    counts: Counter = Counter()
    largest: dict[tuple[int, int], float] = defaultdict(float)
    for cfg in enumerate_configs(n):
        term = prefactor * weyl_term(cfg, phis)
        key = (cfg.p, cfg.r)
        groups[key].add(term)
        counts[key] += 1
        largest[key] = max(largest[key], abs(term))
    return [
        {"p": p, "r": r, "count": counts[(p, r)], "sum": groups[(p, r)].value, "max_abs": largest[(p, r)]}
        for p, r in sorted(groups)
    ]


def saddle_certificate(U: UnitaryMatrix, cfg: SubsetConfig, gamma: complex) -> dict:
    """
    For U = V D V^{−1}, build g = (V ⊕ V)·g_σ with g_σ the permutation sending
    the first N columns onto S, and report the off-diagonal blocks b, c of
    g^{−1} diag(γU, U) g together with |Det d|.
    """
    n = U.n
    _, vectors = np.linalg.eig(U.entries)
    order = [s - 1 for s in cfg.subset] + [s - 1 for s in cfg.complement()]
    perm = np.eye(2 * n)[:, order]
    g = np.block([[vectors, np.zeros((n, n))], [np.zeros((n, n)), vectors]]) @ perm
    return saddle_blocks(g, U, gamma)


def saddle_blocks(g: np.ndarray, U: UnitaryMatrix, gamma: complex) -> dict:
    n = U.n
    gamma_u = np.block([[gamma * U.entries, np.zeros((n, n))], [np.zeros((n, n)), U.entries]])
    m = np.linalg.solve(g, gamma_u @ g)
    b, c, d = m[:n, n:], m[n:, :n], m[n:, n:]
    return {
        "offdiag": float(max(np.max(np.abs(b)), np.max(np.abs(c)))),
        "det_d": float(abs(np.linalg.det(d))),
    }


def is_saddle_point(g: np.ndarray, U: UnitaryMatrix, gamma: complex, tol: float = 1e-9) -> bool:
    blocks = saddle_blocks(g, U, gamma)
    return blocks["offdiag"] <= tol and blocks["det_d"] > tol
