"""
Unitary-matrix construction and sampling, eigenphases, secular coefficients
and the adjoint operator.
"""
import logging
from math import factorial
from typing import Sequence

import numpy as np

from omegalab.core.config import settings
from omegalab.core.errors import EigensolverError
from omegalab.schemas.matrix import EigenphaseSpectrum, RngStream, SecularCoefficients, UnitaryMatrix

logger = logging.getLogger(__name__)


def make_unitary(entries, tol: float | None = None) -> UnitaryMatrix:
    """Certify ``entries`` as a UnitaryMatrix; ``tol`` overrides the construction tolerance."""
    context = {"tol": tol} if tol is not None else None
    return UnitaryMatrix.model_validate({"entries": entries}, context=context)


def haar_batch(n: int, count: int, generator: np.random.Generator) -> np.ndarray:
    """
    ``count`` Haar-distributed n×n unitaries, shape (count, n, n).

    QR of a complex Ginibre matrix with the diagonal of R rotated to the
    positive reals, which makes the law exactly Haar.
    """
    shape = (count, n, n)
    z = (generator.standard_normal(shape) + 1j * generator.standard_normal(shape)) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    phases = d / np.abs(d)
    return q * phases[..., None, :]


def haar_sample(n: int, rng: RngStream) -> UnitaryMatrix:
    return make_unitary(haar_batch(n, 1, rng.generator())[0])


def poisson_batch(n: int, count: int, generator: np.random.Generator) -> np.ndarray:
    """Diagonal unitaries with iid uniform eigenphases, shape (count, n, n)."""
    phases = generator.uniform(0.0, 2 * np.pi, size=(count, n))
    out = np.zeros((count, n, n), dtype=complex)
    idx = np.arange(n)
    out[:, idx, idx] = np.exp(1j * phases)
    return out


def poisson_sample(n: int, rng: RngStream) -> UnitaryMatrix:
    return make_unitary(poisson_batch(n, 1, rng.generator())[0])


def fourier_matrix(n: int) -> np.ndarray:
    j = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)


def kicked_map(n: int, kick_strengths: Sequence[float]) -> UnitaryMatrix:
    """
    Discrete Fourier matrix composed with the kick diag(e^{−i n V(2πj/n)}),
    V(q) = Σ_m k_m cos(m q).
    """
    q = 2 * np.pi * np.arange(n) / n
    potential = np.zeros(n)
    for m, strength in enumerate(kick_strengths, start=1):
        potential += strength * np.cos(m * q)
    kick = np.exp(-1j * n * potential)
    return make_unitary(fourier_matrix(n) * kick[None, :])


def eigenphases(U: UnitaryMatrix) -> EigenphaseSpectrum:
    """Sorted eigenphases in [0, 2π), certified against the characteristic polynomial."""
    try:
        eigenvalues = np.linalg.eigvals(U.entries)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver did not converge for n={U.n}: {exc}") from exc

    thetas = np.mod(np.angle(eigenvalues), 2 * np.pi)
    # mod of a tiny negative angle can round up to exactly 2π
    thetas[thetas >= 2 * np.pi] = 0.0
    thetas = np.sort(thetas)

    points = np.exp(2j * np.pi * (np.arange(8) + 0.5) / 8)
    eye = np.eye(U.n)
    direct = np.array([np.linalg.det(s * eye - U.entries) for s in points])
    from_phases = np.array([np.prod(s - np.exp(1j * thetas)) for s in points])
    scale = max(1.0, float(np.max(np.abs(direct))))
    residual = float(np.max(np.abs(direct - from_phases))) / scale
    if residual > settings.EIGEN_TOL:
        raise EigensolverError(
            f"eigenphases reproduce the characteristic polynomial only to {residual:.3e}"
        )
    return EigenphaseSpectrum(thetas=thetas, residual=residual)


def power_traces(eigenvalues: np.ndarray, kmax: int) -> np.ndarray:
    """t_k = Tr U^k for k = 0..kmax."""
    k = np.arange(kmax + 1)
    return np.sum(eigenvalues[None, :] ** k[:, None], axis=1)


def newton_coefficients(traces: np.ndarray, n: int) -> np.ndarray:
    """a_k = −(1/k)(t_k + Σ_{l=1}^{k−1} a_l t_{k−l})."""
    a = np.zeros(n + 1, dtype=complex)
    a[0] = 1.0
    for k in range(1, n + 1):
        acc = traces[k] + np.dot(a[1:k], traces[k - 1:0:-1])
        a[k] = -acc / k
    return a


def product_coefficients(eigenvalues: np.ndarray) -> np.ndarray:
    """Coefficients of ∏_j (1 − s λ_j), one root at a time."""
    a = np.zeros(len(eigenvalues) + 1, dtype=complex)
    a[0] = 1.0
    for m, lam in enumerate(eigenvalues, start=1):
        a[1:m + 1] = a[1:m + 1] - lam * a[0:m]
    return a


def secular_coefficients(U: UnitaryMatrix, method: str = "auto") -> SecularCoefficients:
    """
    Secular coefficients of Det(1 − sU).

    Args:
        U: the unitary map.
        method: "newton" (power-sum recursion), "product" (root-by-root
            expansion) or "auto" (Newton up to ``settings.NEWTON_MAX_N``).

    Returns:
        SecularCoefficients, validated for a_0 = 1 and self-inversiveness.
    """
    eigenvalues = np.linalg.eigvals(U.entries)
    if method == "auto":
        method = "newton" if U.n <= settings.NEWTON_MAX_N else "product"
    if method == "newton":
        a = newton_coefficients(power_traces(eigenvalues, U.n), U.n)
    elif method == "product":
        a = product_coefficients(eigenvalues)
    else:
        raise ValueError(f"unknown method {method!r}")
    logger.debug("secular coefficients n=%d method=%s", U.n, method)
    return SecularCoefficients(a=a, det_u=complex(np.prod(eigenvalues)))


def secular_coefficients_from_traces(U: UnitaryMatrix) -> np.ndarray:
    """
    Oracle: a_k = ((−1)^k / k!) det M_k with M_k the k×k matrix of power sums
    (t_1 on the diagonal, t_{i−j+1} below it, i on the superdiagonal).
    Only meant for N ≤ 6.
    """
    eigenvalues = np.linalg.eigvals(U.entries)
    t = power_traces(eigenvalues, U.n)
    a = [1.0 + 0j]
    for k in range(1, U.n + 1):
        m = np.zeros((k, k), dtype=complex)
        for i in range(k):
            for j in range(i + 1):
                m[i, j] = t[i - j + 1]
            if i + 1 < k:
                m[i, i + 1] = i + 1
        a.append((-1) ** k * np.linalg.det(m) / factorial(k))
    return np.array(a)


def adjoint_operator(U: UnitaryMatrix) -> np.ndarray:
    """Ad U on row-major vec(Z): vec(U Z U†) = (U ⊗ conj U) vec(Z)."""
    return np.kron(U.entries, U.entries.conj())
