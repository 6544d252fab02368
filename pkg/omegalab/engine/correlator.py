"""
Exact evaluation of Ω_U(γ) through the secular expansion and through the
character (tower) decomposition.
"""
import logging
from typing import Optional

import numpy as np

from omegalab.core.errors import GridPoleError
from omegalab.engine.unitary import secular_coefficients
from omegalab.schemas.curve import CharacterTraces, CorrelatorCurve, GammaGrid
from omegalab.schemas.matrix import UnitaryMatrix

logger = logging.getLogger(__name__)

_POLE_TOL = 1e-14


def secular_powers(grid: GammaGrid, n: int) -> np.ndarray:
    """γ^{k−N/2} for every grid point and k = 0..N, shape (len(grid), N+1)."""
    exponents = np.arange(n + 1) - n / 2
    return np.exp(np.outer(grid.log_gammas(n), exponents))


def omega_from_variances(variances: np.ndarray, n: int, grid: GammaGrid, route: str,
                         scheme: Optional[str] = None, log_scale: float = 0.0) -> CorrelatorCurve:
    """Ω = Σ_k γ^{k−N/2} w_k for given weights w_k (= |a_k|² or an ensemble mean of it)."""
    values = secular_powers(grid, n) @ np.asarray(variances, dtype=complex)
    return CorrelatorCurve(grid=grid, n=n, values=values, route=route, scheme=scheme, log_scale=log_scale)


def omega_secular(U: UnitaryMatrix, grid: GammaGrid) -> CorrelatorCurve:
    coeffs = secular_coefficients(U)
    return omega_from_variances(coeffs.variances(), U.n, grid, route="secular")


def character_traces(U: UnitaryMatrix) -> CharacterTraces:
    """Tr ρ_p(U) = |a_p|² − |a_{p−1}|² for p = 0..⌊N/2⌋."""
    variances = secular_coefficients(U).variances()
    half = U.n // 2
    traces = variances[:half + 1].copy()
    traces[1:] -= variances[:half]
    return CharacterTraces(n=U.n, traces=traces.astype(complex))


def multiplet_factor(n: int, p: int, x):
    """
    sin((x/2)(1 − (2p−1)/N)) / sin(x/2N), the su(2)-multiplet sum at γ = e^{ix/N}.

    The removable point x = 0 returns N − 2p + 1. Other zeros of the
    denominator (x a nonzero multiple of 2πN) raise GridPoleError.
    """
    if not 0 <= p <= n // 2:
        raise ValueError(f"tower index p={p} outside 0..{n // 2}")
    xs = np.asarray(x, dtype=float)
    denom = np.sin(xs / (2 * n))
    near_zero = np.abs(denom) < _POLE_TOL
    at_origin = near_zero & (np.abs(xs) < 1e-9)
    if np.any(near_zero & ~at_origin):
        bad = xs[near_zero & ~at_origin].ravel()[0]
        raise GridPoleError(f"grid pole at x={bad:.6g}: sin(x/2N) vanishes for N={n}")
    safe = np.where(near_zero, 1.0, denom)
    value = np.sin(0.5 * xs * (1 - (2 * p - 1) / n)) / safe
    value = np.where(at_origin, float(n - 2 * p + 1), value)
    return float(value) if value.ndim == 0 else value


def multiplet_matrix(grid: GammaGrid, n: int) -> np.ndarray:
    """
    Multiplet factors m_p(γ) = (γ^{p−N/2} − γ^{N/2+1−p})/(1−γ), shape (len(grid), ⌊N/2⌋+1).

    In x-mode the sine form is used; for general complex γ the factor is
    evaluated as its finite geometric sum Σ_{k=p}^{N−p} γ^{k−N/2}, which has no
    removable singularity at γ = 1.
    """
    half = n // 2
    if grid.mode == "x":
        return np.stack([multiplet_factor(n, p, grid.points) for p in range(half + 1)], axis=1)

    powers = secular_powers(grid, n)
    # cumulative sums give every window k = p..N−p in one pass
    cumulative = np.concatenate([np.zeros((len(grid), 1), dtype=complex), np.cumsum(powers, axis=1)], axis=1)
    columns = [cumulative[:, n - p + 1] - cumulative[:, p] for p in range(half + 1)]
    return np.stack(columns, axis=1)


def omega_from_towers(weights: np.ndarray, n: int, grid: GammaGrid, route: str,
                      scheme: Optional[str] = None, log_scale: float = 0.0) -> CorrelatorCurve:
    """Ω = Σ_p w_p · m_p(γ) for tower weights w_p (damped or averaged character traces)."""
    values = multiplet_matrix(grid, n) @ np.asarray(weights, dtype=complex)
    return CorrelatorCurve(grid=grid, n=n, values=values, route=route, scheme=scheme, log_scale=log_scale)


def omega_character(U: UnitaryMatrix, grid: GammaGrid) -> CorrelatorCurve:
    traces = character_traces(U)
    return omega_from_towers(traces.traces, U.n, grid, route="character")


def omega_quadrature(U: UnitaryMatrix, gamma: complex, points: int = 512) -> complex:
    """
    Trapezoid evaluation of γ^{−N/2} ∫dφ/2π Det(1 − γe^{iφ}U) Det(1 − e^{−iφ}U†).

    The integrand is a trigonometric polynomial of degree N, so the rule is
    exact once ``points`` exceeds N.
    """
    eigenvalues = np.linalg.eigvals(U.entries)
    phis = 2 * np.pi * np.arange(points) / points
    phase = np.exp(1j * phis)[:, None]
    first = np.prod(1 - gamma * phase * eigenvalues[None, :], axis=1)
    second = np.prod(1 - np.conj(phase) * np.conj(eigenvalues)[None, :], axis=1)
    return complex(gamma ** (-U.n / 2) * np.mean(first * second))
