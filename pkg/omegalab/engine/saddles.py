"""
Contribuciones de los puntos de silla estándar ±Σ₃ y sus versiones promediadas.

Convención: sin el prefactor C_N salvo que se pida ``include_cn``.
"""
import logging

import numpy as np
from scipy.linalg import null_space

from omegalab.core.config import settings
from omegalab.core.errors import SaddleDegeneracyError, SpectralGapError
from omegalab.engine.geometry import normalization_constant
from omegalab.schemas.averaging import AveragedAdjoint
from omegalab.schemas.matrix import EigenphaseSpectrum

logger = logging.getLogger(__name__)

_GAP_TOL = 1e-8
_COND_LIMIT = 1e12


def _matrix(adu_avg: AveragedAdjoint | np.ndarray) -> np.ndarray:
    return adu_avg.matrix if isinstance(adu_avg, AveragedAdjoint) else np.asarray(adu_avg, dtype=complex)


def _dimension(matrix: np.ndarray) -> int:
    n = int(round(np.sqrt(matrix.shape[0])))
    if n * n != matrix.shape[0] or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected an N^2 x N^2 matrix, got {matrix.shape}")
    return n


def _saddle(thetas: np.ndarray, gamma: complex) -> complex:
    """γ^{−N/2} / ∏_{i,j} (1 − γ e^{i(θ_i − θ_j)})."""
    n = len(thetas)
    factors = 1 - gamma * np.exp(1j * np.subtract.outer(thetas, thetas))
    smallest = float(np.min(np.abs(factors)))
    if smallest < settings.DEGENERACY_TOL:
        raise SaddleDegeneracyError(
            f"saddle degeneracy: gamma*exp(i(theta_i - theta_j)) = 1 to within {smallest:.2e}"
        )
    return complex(np.exp(-0.5 * n * np.log(complex(gamma)) - np.sum(np.log(factors))))


def standard_saddles(thetas: EigenphaseSpectrum | np.ndarray, gamma: complex) -> tuple[complex, complex]:
    """
    Contribuciones cuadráticas alrededor de Z = 0 (plus) y Z' = 0 (minus).

    plus = γ^{−N/2}/[(1−γ)^N ∏_{i≠j}(1−γe^{i(θ_i−θ_j)})]; minus es lo mismo con γ → γ^{−1}.
    """
    thetas = np.asarray(thetas.thetas if isinstance(thetas, EigenphaseSpectrum) else thetas, dtype=float)
    gamma = complex(gamma)
    return _saddle(thetas, gamma), _saddle(thetas, 1 / gamma)


def averaged_standard_saddles(adu_avg: AveragedAdjoint | np.ndarray, x: float, include_cn: bool = False) -> float:
    """2 C_N Re(e^{−ix/2} / Det(I − e^{ix/N}⟨Ad U⟩))."""
    matrix = _matrix(adu_avg)
    n = _dimension(matrix)
    system = np.eye(n * n) - np.exp(1j * x / n) * matrix
    if np.linalg.cond(system) > _COND_LIMIT:
        raise SaddleDegeneracyError(
            f"averaged saddle degenerate: I - exp(ix/N)<Ad U> is singular at x={x:g}"
        )
    sign, logdet = np.linalg.slogdet(system)
    value = 2 * np.real(np.exp(-0.5j * x - logdet) / sign)
    if include_cn:
        value *= normalization_constant(n)
    return float(value)


def uniform_complement(n: int) -> np.ndarray:
    """Orthonormal basis of the traceless matrices, the complement of vec(I)."""
    return null_space(np.eye(n).reshape(1, -1))


def _restricted(matrix: np.ndarray) -> np.ndarray:
    n = _dimension(matrix)
    basis = uniform_complement(n)
    return basis.conj().T @ matrix @ basis


def gap_diagnostic(adu_avg: AveragedAdjoint | np.ndarray) -> tuple[float, float]:
    """
    (gap, relevance_sum) of the averaged adjoint on the complement of the uniform mode.

    gap = 1 − max_{j≥2}|λ_j|; relevance_sum = |Σ_{j≥2} λ_j/(1 − λ_j)|.
    """
    matrix = _matrix(adu_avg)
    if matrix.shape[0] == 1:
        return 1.0, 0.0
    others = np.linalg.eigvals(_restricted(matrix))
    gap = float(1 - np.max(np.abs(others)))
    with np.errstate(divide="ignore", invalid="ignore"):
        relevance = np.sum(others / (1 - others))
    relevance_sum = float(np.abs(relevance)) if np.isfinite(relevance) else float("inf")
    return gap, relevance_sum


def zirn_approximation(adu_avg: AveragedAdjoint | np.ndarray, x: float, include_cn: bool = False) -> float:
    """
    Lowest order in 1/N: N·C_N/Det_⊥(I − ⟨Ad U⟩) · sin(x/2)/(x/2).

    Det_⊥ is taken on the traceless matrices, where the uniform mode is absent.
    """
    matrix = _matrix(adu_avg)
    n = _dimension(matrix)
    gap, _ = gap_diagnostic(matrix)
    if gap <= _GAP_TOL:
        raise SpectralGapError(f"no spectral gap (gap = {gap:.2e}); the lowest-order formula is inapplicable")
    restricted = _restricted(matrix)
    det_perp = np.linalg.det(np.eye(len(restricted)) - restricted) if len(restricted) else 1.0
    sinc = np.sinc(x / (2 * np.pi))
    value = n / det_perp * sinc
    if include_cn:
        value *= normalization_constant(n)
    logger.debug("zirn N=%d x=%g det_perp=%s gap=%.3g", n, x, det_perp, gap)
    return float(np.real(value))
