"""
Poisson → CUE crossover under heat-kernel averaging, ε = Nϵ.

The Poisson-averaged traces ⟨Tr ρ_p⟩ = C(N,p) − C(N,p−1) are damped by
e^{−2(ε/N)p(N+1−p)} and summed against the multiplet factors. For large N
the sum is a Laplace integral over y = p/N with exponent f_ε(y) = f(y) − 2εy(1−y).
"""
import logging
from math import comb

import numpy as np
from scipy.optimize import bisect
from scipy.special import entr, gammaln

from omegalab.core.errors import DomainError, RegimeError
from omegalab.engine.correlator import multiplet_matrix
from omegalab.schemas.crossover import CRITICAL_TOL, CrossoverPoint
from omegalab.schemas.curve import CorrelatorCurve, GammaGrid

logger = logging.getLogger(__name__)

EXACT_TRACES_MAX_N = 300
CROSSOVER_MAX_N = 10_000


def poisson_traces_exact(n: int) -> list[int]:
    """C(N,p) − C(N,p−1) for p = 0..⌊N/2⌋ (Catalan triangle)."""
    return [comb(n, p) - (comb(n, p - 1) if p else 0) for p in range(n // 2 + 1)]


def log_poisson_traces(n: int) -> np.ndarray:
    """log(C(N,p) − C(N,p−1)) = log C(N,p) + log((N−2p+1)/(N−p+1))."""
    p = np.arange(n // 2 + 1)
    log_binomial = gammaln(n + 1) - gammaln(p + 1) - gammaln(n - p + 1)
    return log_binomial + np.log((n - 2 * p + 1) / (n - p + 1))


def poisson_traces(n: int) -> np.ndarray:
    """Poisson averages of Tr ρ_p as floats; from exact integers up to N = 300, from log-space above."""
    if n < 1:
        raise DomainError("N must be at least 1")
    if n <= EXACT_TRACES_MAX_N:
        return np.array([float(t) for t in poisson_traces_exact(n)])
    return np.exp(log_poisson_traces(n))


def poisson_trace_stirling(n: int, p: int) -> float:
    """(1−2y)/(1−y) · e^{Nf(y)}/√(2πN y(1−y)) at y = p/N, for 0 < p < N/2."""
    y = p / n
    if not 0 < y < 0.5:
        raise DomainError(f"Stirling form needs 0 < p < N/2, got p={p}, N={n}")
    return float((1 - 2 * y) / (1 - y) * np.exp(n * f_entropy(y)) / np.sqrt(2 * np.pi * n * y * (1 - y)))


def f_entropy(y):
    """f(y) = −y log y − (1−y) log(1−y) on [0, 1]."""
    ys = np.asarray(y, dtype=float)
    if np.any((ys < 0) | (ys > 1)):
        raise DomainError("entropy function needs 0 <= y <= 1")
    value = entr(ys) + entr(1 - ys)
    return float(value) if value.ndim == 0 else value


def f_eps(y, eps: float):
    """f_ε(y) = f(y) − 2εy(1−y)."""
    ys = np.asarray(y, dtype=float)
    value = f_entropy(ys) - 2 * eps * ys * (1 - ys)
    return float(value) if np.ndim(value) == 0 else value


def f_eps_prime(y: float, eps: float) -> float:
    return float(np.log((1 - y) / y) - 2 * eps * (1 - 2 * y))


def f_eps_second(y: float, eps: float) -> float:
    return float(-1 / (y * (1 - y)) + 4 * eps)


def _stationarity(s: float, eps: float) -> float:
    """f′_ε(e^s), written without cancellation at both ends of (0, 1/2)."""
    y = np.exp(s)
    gap = 0.5 - y
    if y > 0.25:
        return float(np.log1p(2 * gap / y) - 4 * eps * gap)
    return float(np.log1p(-y) - s - 2 * eps * (1 - 2 * y))


def solve_y_eps(eps: float) -> float:
    """
    Interior maximum y_ε ∈ (0, 1/2) of f_ε, i.e. the root of log((1−y)/y) = 2ε(1−2y).

    Bisection runs in s = log y so that the exponentially small roots of large ε
    keep full relative precision.
    """
    if eps <= 1:
        raise RegimeError(f"no interior maximum for eps={eps:g} <= 1; subcritical")
    lower = -2 * eps - 50.0
    upper = float(np.log(0.5 - 1e-12))
    if _stationarity(upper, eps) >= 0:
        raise RegimeError(f"eps={eps:g} too close to 1: the maximum has not separated from y = 1/2")
    s = bisect(_stationarity, lower, upper, args=(eps,), xtol=1e-13, maxiter=500)
    return float(np.exp(s))


def classify_regime(n: int, eps: float) -> CrossoverPoint:
    if abs(eps - 1) <= CRITICAL_TOL:
        return CrossoverPoint(n=n, eps=eps, regime="critical")
    if eps < 1:
        return CrossoverPoint(n=n, eps=eps, regime="subcritical")
    return CrossoverPoint(n=n, eps=eps, regime="supercritical", y_eps=solve_y_eps(eps))


def _label(eps: float) -> str:
    return f"crossover(eps={eps:g})"


def crossover_exact(n: int, eps: float, grid: GammaGrid) -> CorrelatorCurve:
    """
    ⟨Ω⟩ = Σ_p ⟨Tr ρ_p⟩_Poisson e^{−2(ε/N)p(N+1−p)} m_p(x).

    Weights are formed in log-space and shifted by their maximum, which is
    returned as ``log_scale``.
    """
    if eps < 0:
        raise DomainError(f"eps must be >= 0, got {eps}")
    if n > CROSSOVER_MAX_N:
        raise DomainError(f"crossover_exact supports N <= {CROSSOVER_MAX_N}")
    p = np.arange(n // 2 + 1)
    log_weights = log_poisson_traces(n) - 2 * (eps / n) * p * (n + 1 - p)
    shift = float(np.max(log_weights))
    values = multiplet_matrix(grid, n) @ np.exp(log_weights - shift)
    logger.debug("crossover exact N=%d eps=%g log_scale=%.6g", n, eps, shift)
    return CorrelatorCurve(grid=grid, n=n, values=np.real(values).astype(complex),
                           route="character", scheme=_label(eps), log_scale=shift)


def _sin_ratio(xs: np.ndarray, shift: float) -> np.ndarray:
    """sin(x·shift)/x with its value ``shift`` at x = 0."""
    at_origin = np.abs(xs) < 1e-12
    safe = np.where(at_origin, 1.0, xs)
    return np.where(at_origin, shift, np.sin(safe * shift) / safe)


def asymptotic_correlator(n: int, eps: float, grid: GammaGrid) -> CorrelatorCurve:
    """
    Large-N form of ``crossover_exact``.

    subcritical: 2^N e^{−Nε/2} (1−ε)^{−3/2} e^{−ε}, constant in x
    supercritical: N·g(y_ε)·e^{N f_ε(y_ε)}·√(2π/(N|f″_ε(y_ε)|)) with
    g(y) = (1−2y)/((1−y)√(2πNy(1−y)))·e^{−2εy}·2N sin(x(1/2−y))/x
    """
    point = classify_regime(n, eps)
    xs = grid.xs(n)
    if point.regime == "critical":
        raise RegimeError("critical regime: no closed form implemented")
    if point.regime == "subcritical":
        log_scale = n * np.log(2) - 0.5 * n * eps - 1.5 * np.log1p(-eps) - eps
        values = np.ones(len(grid), dtype=complex)
    else:
        y = point.y_eps
        curvature = abs(f_eps_second(y, eps))
        log_scale = (np.log(n) + np.log((1 - 2 * y) / (1 - y)) - 0.5 * np.log(2 * np.pi * n * y * (1 - y))
                     - 2 * eps * y + n * f_eps(y, eps) + 0.5 * np.log(2 * np.pi / (n * curvature)))
        values = (2 * n * _sin_ratio(xs, 0.5 - y)).astype(complex)
    return CorrelatorCurve(grid=grid, n=n, values=values, route="saddle-laplace",
                           scheme=_label(eps), log_scale=float(log_scale))


def curve_zeros(curve: CorrelatorCurve) -> np.ndarray:
    """x positions of the sign changes of Re Ω, by linear interpolation."""
    if curve.grid.mode != "x":
        raise ValueError("zeros are located on x-mode grids")
    xs = curve.grid.points
    values = np.real(curve.values)
    crossing = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)
    left, right = values[crossing], values[crossing + 1]
    return xs[crossing] - left * (xs[crossing + 1] - xs[crossing]) / (right - left)
