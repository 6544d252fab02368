"""
Coherent-state integral over ℳ_N = U(2N)/U(N)×U(N): invariant sampling,
Monte Carlo evaluation of Ω, and the closed-form constants (C_N, Hua
integrals, submanifold volumes, critical-set census).
"""
import logging
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np

from omegalab.core.config import settings
from omegalab.core.errors import DomainError, LogBranchError, NumericalDegeneracyError, OracleScaleError
from omegalab.engine.montecarlo import run_blocks, sample_moments
from omegalab.engine.unitary import haar_batch
from omegalab.schemas.geometry import GrassmannPoint, ManifoldCensus, ManifoldClass, McEstimate
from omegalab.schemas.matrix import RngStream, UnitaryMatrix

logger = logging.getLogger(__name__)

_COND_LIMIT = 1e10
_MAX_RETRIES = 10


@lru_cache(maxsize=None)
def gamma_string(n: int) -> int:
    """Γ(1)Γ(2)…Γ(n) = ∏_{k<n} k!; the empty product (n = 0) is 1."""
    if n < 0:
        raise DomainError(f"gamma string of negative length {n}")
    out = 1
    for k in range(n):
        out *= factorial(k)
    return out


def hua_integral_exact(m: int, n: int) -> Fraction:
    """I(m,n) = Γ(1)…Γ(m)·Γ(1)…Γ(n) / Γ(1)…Γ(m+n)."""
    return Fraction(gamma_string(m) * gamma_string(n), gamma_string(m + n))


def normalization_constant_exact(n: int) -> Fraction:
    """C_N = Γ(N+2)…Γ(2N+1) / Γ(2)…Γ(N+1)."""
    return Fraction(gamma_string(2 * n + 1), gamma_string(n + 1) ** 2)


def normalization_constant(n: int) -> float:
    return float(normalization_constant_exact(n))


def total_mass_exact(n: int) -> Fraction:
    return normalization_constant_exact(n) * hua_integral_exact(n, n)


def total_mass(n: int) -> float:
    """C_N·I(N,N), which is C(2N,N)."""
    return float(total_mass_exact(n))


def vol_submanifold(n: int, p: int, r: int) -> float:
    """
    Vol ℳ_(p,r) = (Γ(1)…Γ(r))² Γ(1)…Γ(p−r) Γ(1)…Γ(N−p−r) / Γ(1)…Γ(N).

    Isolated points come out with volume 1 (counting measure).
    """
    if not 0 <= p <= n or not 0 <= r <= min(p, n - p):
        raise DomainError(f"(p, r) = ({p}, {r}) outside 0 <= p <= {n}, 0 <= r <= min(p, N - p)")
    value = Fraction(gamma_string(r) ** 2 * gamma_string(p - r) * gamma_string(n - p - r), gamma_string(n))
    return float(value)


def manifold_points(n: int, p: int, r: int) -> int:
    return comb(n, p) * comb(p, r) * comb(n - p, r)


def expected_manifold_count(n: int) -> int:
    """(N/2+1)² for even N, (N+1)(N+3)/4 for odd N."""
    if n % 2 == 0:
        return (n // 2 + 1) ** 2
    return (n + 1) * (n + 3) // 4


def manifold_census(n: int) -> ManifoldCensus:
    classes = [
        ManifoldClass(p=p, r=r, volume=vol_submanifold(n, p, r), points=manifold_points(n, p, r))
        for p in range(n + 1)
        for r in range(min(p, n - p) + 1)
    ]
    return ManifoldCensus(n=n, classes=classes)


def _stereographic(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Z = g₁₂ g₂₂⁻¹ for a stack of 2N×2N matrices, plus a mask of well-conditioned blocks."""
    n = g.shape[-1] // 2
    g12, g22 = g[:, :n, n:], g[:, n:, n:]
    ok = np.linalg.cond(g22) < _COND_LIMIT
    z = np.zeros_like(g12)
    z[ok] = np.linalg.solve(np.swapaxes(g22[ok], -1, -2), np.swapaxes(g12[ok], -1, -2)).swapaxes(-1, -2)
    return z, ok


def sample_invariant_batch(n: int, count: int, generator: np.random.Generator) -> np.ndarray:
    """``count`` stereographic coordinates distributed per the invariant measure, shape (count, N, N)."""
    out = np.empty((0, n, n), dtype=complex)
    for _ in range(_MAX_RETRIES + 1):
        z, ok = _stereographic(haar_batch(2 * n, count - len(out), generator))
        out = np.concatenate([out, z[ok]])
        if len(out) == count:
            return out
    raise NumericalDegeneracyError(f"singular g22 blocks persisted over {_MAX_RETRIES} retries")


def sample_invariant(n: int, rng: RngStream) -> GrassmannPoint:
    generator = rng.generator()
    for _ in range(_MAX_RETRIES):
        g = haar_batch(2 * n, 1, generator)
        z, ok = _stereographic(g)
        if ok[0]:
            return GrassmannPoint(z=z[0], source=g[0])
    raise NumericalDegeneracyError(f"singular g22 block in {_MAX_RETRIES} consecutive draws")


def _integrand(zs: np.ndarray, u: np.ndarray, gamma: complex) -> np.ndarray:
    """γ^{−N/2} Det(1 + γZ†UZU†) / Det(1 + Z†Z) for a stack of Z."""
    n = u.shape[0]
    eye = np.eye(n)
    zh = np.conj(np.swapaxes(zs, -1, -2))
    numerator = np.linalg.det(eye + gamma * zh @ u @ zs @ u.conj().T)
    denominator = np.linalg.det(eye + zh @ zs)
    return gamma ** (-n / 2) * numerator / denominator


def mc_omega(U: UnitaryMatrix, gamma: complex, samples: int, rng: RngStream,
             workers: int | None = None) -> McEstimate:
    """Ω = mass · E_μ[γ^{−N/2} Det(1 + γZ†UZU†)/Det(1 + Z†Z)] over invariantly sampled Z."""
    n = U.n
    if n > settings.MC_MAX_N:
        raise OracleScaleError(f"mc_omega capped at N={settings.MC_MAX_N}, got N={n}")
    gamma = complex(gamma)

    def block(generator, count):
        return sample_moments(_integrand(sample_invariant_batch(n, count, generator), U.entries, gamma))

    mean, stderr = run_blocks(samples, rng, block, workers)
    mass = total_mass(n)
    logger.debug("mc_omega N=%d gamma=%s samples=%d", n, gamma, samples)
    return McEstimate(estimate=complex(mass * mean), stderr=float(mass * stderr), samples=samples)


def vacuum_overlap_mc(n: int, samples: int, rng: RngStream) -> McEstimate:
    """E_μ[Det(1 + Z†Z)^{−1}]; the resolution of unity on the vacuum makes it 1/C(2N,N)."""

    def block(generator, count):
        zs = sample_invariant_batch(n, count, generator)
        values = 1 / np.linalg.det(np.eye(n) + np.conj(np.swapaxes(zs, -1, -2)) @ zs)
        return sample_moments(values)

    mean, stderr = run_blocks(samples, rng, block)
    return McEstimate(estimate=complex(mean), stderr=float(stderr), samples=samples)


def effective_action(U: UnitaryMatrix, gamma: complex, z: np.ndarray) -> complex:
    """S = −Tr{log(1 + γZ†UZU⁻¹) − log(1 + ZZ†)} + (N/2) log γ."""
    z = np.asarray(z, dtype=complex)
    n = U.n
    eye = np.eye(n)
    zh = z.conj().T
    first = eye + gamma * zh @ U.entries @ z @ U.entries.conj().T
    second = eye + z @ zh
    logs = []
    for m in (first, second):
        sign, logabs = np.linalg.slogdet(m)
        if sign == 0 or not np.isfinite(logabs):
            raise LogBranchError("singular argument in the effective action")
        logs.append(logabs + 1j * np.angle(sign))
    return complex(-(logs[0] - logs[1]) + 0.5 * n * np.log(complex(gamma)))


def hua_integral_mc(m: int, n: int, samples: int, rng: RngStream) -> McEstimate:
    """
    I(m,n) as the volume fraction of {A ∈ C^{m×n} : ‖A‖ < 1} inside the
    polydisc, estimated with iid uniform unit-disk entries.
    """

    def block(generator, count):
        radius = np.sqrt(generator.uniform(size=(count, m, n)))
        angle = generator.uniform(0, 2 * np.pi, size=(count, m, n))
        a = radius * np.exp(1j * angle)
        inside = (np.linalg.norm(a, ord=2, axis=(-2, -1)) < 1).astype(float)
        return sample_moments(inside)

    mean, stderr = run_blocks(samples, rng, block)
    return McEstimate(estimate=complex(mean), stderr=float(stderr), samples=samples)
