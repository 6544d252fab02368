"""
Batería de verificación cruzada (`omegalab verify`).

Cada comprobación devuelve un resumen si pasa y lanza AssertionError si no.
``quick`` se queda en N ≤ 3 y tarda segundos; ``full`` llega a N = 8 en las
rutas exactas e incluye los Monte Carlo.
"""
import logging
import time
from math import comb
from typing import Callable, Literal

import numpy as np
from pydantic import BaseModel

from omegalab.core.errors import OmegaLabError
from omegalab.engine.averaging import (
    ensemble_correlator, ensemble_variances, isotropic_correlator, v_average_adjoint, v_average_adjoint_mc,
    v_saddle_from_alpha,
)
from omegalab.engine.correlator import omega_character, omega_secular
from omegalab.engine.crossover import (
    asymptotic_correlator, crossover_exact, curve_zeros, poisson_traces_exact, solve_y_eps,
)
from omegalab.engine.fock import build_basis, character_trace, expected_laplacian_spectrum, laplacian_spectrum
from omegalab.engine.geometry import (
    expected_manifold_count, manifold_census, mc_omega, total_mass_exact,
)
from omegalab.engine.loops import loop_constant, wick_expectation
from omegalab.engine.unitary import adjoint_operator, haar_sample, poisson_sample
from omegalab.engine.weyl import weyl_sum
from omegalab.schemas.curve import GammaGrid
from omegalab.schemas.matrix import RngStream

logger = logging.getLogger(__name__)

Level = Literal["quick", "full"]
CheckFunction = Callable[[Level, RngStream], str]

# cota de Bonferroni para el máximo de muchos z-scores
MAX_Z = 4.5


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str
    seconds: float


_CHECKS: list[tuple[str, CheckFunction]] = []


def check(name: str):
    def register(func: CheckFunction) -> CheckFunction:
        _CHECKS.append((name, func))
        return func
    return register


def _relative(values: np.ndarray, reference: np.ndarray) -> float:
    """Desviación máxima relativa a la escala de la curva de referencia."""
    scale = max(1.0, float(np.max(np.abs(reference))))
    return float(np.max(np.abs(values - reference))) / scale


def _random_gammas(generator: np.random.Generator, count: int) -> GammaGrid:
    radii = generator.uniform(0.5, 1.5, count)
    return GammaGrid.from_gamma(radii * np.exp(1j * generator.uniform(0, 2 * np.pi, count)))


@check("route-equivalence")
def _route_equivalence(level: Level, rng: RngStream) -> str:
    trials, top = (12, 3) if level == "quick" else (50, 8)
    worst = 0.0
    for trial in range(trials):
        n = 1 + trial % top
        U = haar_sample(n, rng.substream(trial))
        grid = _random_gammas(rng.generator(trial), 20)
        worst = max(worst, _relative(omega_character(U, grid).values, omega_secular(U, grid).values))
    assert worst <= 1e-9, f"secular and character routes differ by {worst:.3e}"
    return f"{trials} matrices, max deviation {worst:.2e}"


@check("fock-oracle")
def _fock_oracle(level: Level, rng: RngStream) -> str:
    sizes = [1, 2] if level == "quick" else [1, 2, 3]
    worst = 0.0
    for n in sizes:
        basis = build_basis(n)
        for trial in range(3 if level == "quick" else 7):
            U = haar_sample(n, rng.substream(100 * n + trial))
            grid = _random_gammas(rng.generator(100 * n + trial), 3)
            exact = omega_secular(U, grid).values
            fock = np.array([character_trace(U, g, basis) for g in grid.points])
            worst = max(worst, _relative(fock, exact))
    assert worst <= 1e-8, f"Fock trace deviates from the secular route by {worst:.3e}"
    return f"N in {sizes}, max deviation {worst:.2e}"


@check("weyl-exactness")
def _weyl_exactness(level: Level, rng: RngStream) -> str:
    top = 3 if level == "quick" else 6
    grid = GammaGrid.from_x([0.3, 1.7, 4.1, 9.0])
    stress = GammaGrid.from_x([1e-4])
    worst, worst_stress = 0.0, 0.0
    for n in range(1, top + 1):
        U = poisson_sample(n, rng.substream(n))
        worst = max(worst, _relative(weyl_sum(U, grid).values, omega_secular(U, grid).values))
        worst_stress = max(worst_stress, _relative(weyl_sum(U, stress).values, omega_secular(U, stress).values))
    assert worst <= 1e-7, f"Weyl sum deviates from the secular route by {worst:.3e}"
    assert worst_stress <= 1e-4, f"Weyl sum at x = 1e-4 deviates by {worst_stress:.3e}"
    return f"N <= {top}, max deviation {worst:.2e}, at x = 1e-4 {worst_stress:.2e}"


@check("casimir-table")
def _casimir_table(level: Level, rng: RngStream) -> str:
    top = 2 if level == "quick" else 4
    for n in range(1, top + 1):
        spectrum = laplacian_spectrum(build_basis(n))
        expected = expected_laplacian_spectrum(n)
        assert spectrum == expected, f"N={n}: Laplacian spectrum {spectrum} != {expected}"
    return f"N <= {top} exact"


@check("loop-constants")
def _loop_constants(level: Level, rng: RngStream) -> str:
    one_loop = [1, 2] if level == "quick" else [1, 2, 3]
    two_loop = [1] if level == "quick" else [1, 2]
    worst = 0.0
    for order, sizes in ((1, one_loop), (2, two_loop)):
        for n in sizes:
            for trial in range(2 if level == "quick" else 5):
                generator = rng.generator(10 * n + trial, order)
                if order == 1:
                    # one loop: any coupling gives −N³
                    size = n * n
                    T = 0.3 * (generator.normal(size=(size, size)) + 1j * generator.normal(size=(size, size))) / size
                else:
                    phase = np.exp(1j * generator.uniform(0, 2 * np.pi))
                    T = 0.5 * phase * adjoint_operator(haar_sample(n, rng.substream(10 * n + trial)))
                constant = float(loop_constant(n, order))
                value = wick_expectation(T, order)
                worst = max(worst, abs(value - constant) / abs(constant))
    assert worst <= 1e-8, f"Wick expectation differs from its constant by {worst:.3e}"
    return f"one loop N in {one_loop}, two loops N in {two_loop}, max deviation {worst:.2e}"


@check("ensemble-baselines")
def _ensemble_baselines(level: Level, rng: RngStream) -> str:
    for n in range(1, 21):
        total = sum(ensemble_variances("poisson", n))
        assert total == 2 ** n, f"Poisson Omega(1) = {total} != 2^{n}"

    n = 50
    grid = GammaGrid.x_range(0.5, 20, 200)
    cue = ensemble_correlator("cue", n, grid).values.real
    deviation = float(np.max(np.abs(cue - n * np.sinc(grid.points / (2 * np.pi))))) / (n + 1)
    assert deviation <= 0.02, f"CUE N=50 deviates from N sin(x/2)/(x/2) by {deviation:.3%} of the peak"
    summary = f"Poisson 2^N for N <= 20, CUE N=50 within {deviation:.2%}"

    if level == "full":
        grid = GammaGrid.x_range(0.5, 10, 12)
        sampled = ensemble_correlator("cue", 8, grid, samples=10_000, rng=rng.substream(1))
        exact = ensemble_correlator("cue", 8, grid).values
        z = float(np.max(np.abs(sampled.values - exact) / sampled.stderr))
        assert z <= MAX_Z, f"CUE Monte Carlo at N=8 is {z:.2f} sigma off"
        summary += f", CUE MC max z {z:.2f}"
    return summary


@check("basis-average")
def _basis_average(level: Level, rng: RngStream) -> str:
    sizes = [2] if level == "quick" else [2, 3, 4, 5]
    worst_z = 0.0
    for n in sizes:
        U = haar_sample(n, rng.substream(n))
        exact = v_average_adjoint(U).matrix
        sampled = v_average_adjoint_mc(U, 20_000, rng.substream(1000 + n))
        diff = np.abs(sampled.matrix - exact)
        noisy = sampled.stderr > 1e-12
        assert np.all(diff[~noisy] <= 1e-10), f"N={n}: deterministic entries of the average disagree"
        worst_z = max(worst_z, float(np.max(diff[noisy] / sampled.stderr[noisy])))
    assert worst_z <= MAX_Z, f"eigenbasis average off by {worst_z:.2f} sigma"

    # con el α medio de Poisson la forma asintótica da una curva tipo CUE
    n = 20
    mismatch = abs(v_saddle_from_alpha(n, (n - 1) / n, 0.0)) / 2 ** n
    assert mismatch > 1e3, f"Poisson mismatch factor only {mismatch:.3g}"
    return f"N in {sizes}, max z {worst_z:.2f}; Poisson mismatch factor {mismatch:.3g} at N=20"


@check("isotropic-scheme")
def _isotropic_scheme(level: Level, rng: RngStream) -> str:
    U = haar_sample(4, rng.substream(4))
    grid = GammaGrid.x_range(0.0, 12.0, 25)
    identity = _relative(isotropic_correlator(U, 0.0, grid).values, omega_character(U, grid).values)
    assert identity <= 1e-12, f"zero kernel time changes Omega by {identity:.3e}"

    n = 100
    U = haar_sample(n, rng.substream(n))
    xs = GammaGrid.x_range(0.1, 20, 200)
    curve = isotropic_correlator(U, 6.0 / n, xs).values.real
    peak = isotropic_correlator(U, 6.0 / n, GammaGrid.from_x([0.0])).values.real[0]
    deviation = float(np.max(np.abs(curve / peak - np.sinc(xs.points / (2 * np.pi)))))
    assert deviation <= 0.02, f"damped curve at N=100, eps=6 deviates from the CUE shape by {deviation:.3%}"
    return f"eps=0 identity {identity:.1e}, universality deviation {deviation:.2%}"


@check("crossover")
def _crossover(level: Level, rng: RngStream) -> str:
    for n in range(1, 31):
        total = sum(t * (n - 2 * p + 1) for p, t in enumerate(poisson_traces_exact(n)))
        assert total == 2 ** n, f"N={n}: sum of Poisson traces times multiplicities is {total}"

    ratio = solve_y_eps(8.0) / np.exp(-16.0)
    assert 0.95 <= ratio <= 1.05, f"y_8 / e^-16 = {ratio:.4f}"

    grid = GammaGrid.from_x([1.0])
    exact = crossover_exact(60, 0.5, grid)
    approx = asymptotic_correlator(60, 0.5, grid)
    sub = float(np.real(exact.values[0] / approx.values[0]) * np.exp(exact.log_scale - approx.log_scale))
    assert abs(sub - 1) <= 0.1, f"subcritical exact/asymptotic = {sub:.4f} at N=60"
    summary = f"identity N <= 30, y_8 ratio {ratio:.4f}, subcritical ratio {sub:.4f}"

    if level == "full":
        grid = GammaGrid.x_range(0.0, 40.0, 4001)
        for eps in (1.5, 2.0, 3.0):
            zeros = curve_zeros(crossover_exact(2000, eps, grid))
            expected = 2 * np.pi / (1 - 2 * solve_y_eps(eps))
            spacing = float(np.mean(np.diff(zeros)))
            assert abs(spacing / expected - 1) <= 0.02, f"eps={eps}: zero spacing {spacing:.4f} vs {expected:.4f}"
        summary += ", supercritical zero spacing within 2%"
    return summary


@check("geometry")
def _geometry(level: Level, rng: RngStream) -> str:
    for n in range(1, 13):
        assert total_mass_exact(n) == comb(2 * n, n), f"N={n}: C_N I(N,N) != C(2N,N)"
    for n in range(1, 11):
        census = manifold_census(n)
        assert census.count == expected_manifold_count(n), f"N={n}: {census.count} manifolds"
        assert census.total_points == comb(2 * n, n), f"N={n}: census holds {census.total_points} points"
    summary = "mass identity N <= 12, census N <= 10"

    if level == "full":
        worst = 0.0
        for trial in range(10):
            n = 1 + trial % 2
            generator = rng.generator(100 + trial)
            U = haar_sample(n, rng.substream(100 + trial))
            gamma = generator.uniform(0.6, 1.4) * np.exp(1j * generator.uniform(0, 2 * np.pi))
            exact = omega_secular(U, GammaGrid.from_gamma([gamma])).values[0]
            estimate = mc_omega(U, complex(gamma), 1_000_000, rng.substream(200 + trial))
            worst = max(worst, estimate.z_score(exact))
        assert worst <= MAX_Z, f"mc_omega is {worst:.2f} sigma off the exact value"
        summary += f", mc_omega N <= 2 on 10 (U, gamma), max z {worst:.2f}"
    return summary


def run_suite(level: Level, seed: int) -> list[CheckResult]:
    """Ejecuta todas las comprobaciones; un fallo no detiene las siguientes."""
    rng = RngStream(seed=seed)
    results = []
    for index, (name, func) in enumerate(_CHECKS):
        start = time.perf_counter()
        try:
            detail, passed = func(level, rng.substream(index)), True
        except AssertionError as exc:
            detail, passed = str(exc), False
        except OmegaLabError as exc:
            detail, passed = f"{type(exc).__name__}: {exc.detail}", False
        seconds = time.perf_counter() - start
        logger.info("%-20s %s (%.1fs) %s", name, "ok" if passed else "FAILED", seconds, detail)
        results.append(CheckResult(name=name, passed=passed, detail=detail, seconds=seconds))
    return results
