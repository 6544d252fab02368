"""
Averaging schemes for Ω and for the adjoint action Ad U.

- basis: U → VUV⁻¹ with Haar V (closed form plus a Monte Carlo oracle)
- isotropic: heat-kernel time ϵ, applied exactly through Casimir damping
  of the character traces; ε = Nϵ damps the traceless part of Ad U
- semiclassical: e^{−iΣ t_j H_j}U with Gaussian t_j
- ensemble: Poisson and CUE, analytic and sampled
"""
import logging
from math import comb
from typing import Literal, Optional

import numpy as np
from scipy.special import gammaln

from omegalab.core.errors import DomainError, UndefinedAverageError
from omegalab.engine.correlator import character_traces, omega_from_towers, omega_from_variances, secular_powers
from omegalab.engine.geometry import normalization_constant
from omegalab.engine.montecarlo import run_blocks
from omegalab.engine.unitary import adjoint_operator, fourier_matrix, haar_batch, poisson_batch
from omegalab.schemas.averaging import AveragedAdjoint, AveragingScheme
from omegalab.schemas.curve import CorrelatorCurve, GammaGrid
from omegalab.schemas.matrix import RngStream, UnitaryMatrix

logger = logging.getLogger(__name__)


def uniform_projector(n: int) -> np.ndarray:
    """P_I = vec(I) vec(I)ᵀ / N."""
    identity = np.eye(n).reshape(-1)
    return np.outer(identity, identity) / n


def alpha(U: UnitaryMatrix) -> float:
    """α = (|Tr U|² − 1)/N."""
    return float((abs(U.trace()) ** 2 - 1) / U.n)


def v_average_eigenvalue(U: UnitaryMatrix) -> float:
    """(|Tr U|² − 1)/(N² − 1), the eigenvalue of ⟨Ad U⟩_V on the traceless matrices."""
    n = U.n
    if n < 2:
        raise UndefinedAverageError("the eigenbasis average needs N >= 2 (N^2 - 1 = 0)")
    return float((abs(U.trace()) ** 2 - 1) / (n * n - 1))


def v_average_adjoint(U: UnitaryMatrix) -> AveragedAdjoint:
    """⟨Ad U⟩_V = P_I + (1 − P_I)(|Tr U|² − 1)/(N² − 1)."""
    lam = v_average_eigenvalue(U)
    projector = uniform_projector(U.n)
    matrix = projector + lam * (np.eye(U.n ** 2) - projector)
    return AveragedAdjoint(matrix=matrix.astype(complex), scheme=AveragingScheme(kind="basis"))


def adjoint_moments(ws: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    (Σ_s Ad W_s, Σ_s |Ad W_s|²) entrywise for a stack W, shape (S, N, N).

    (Ad W)_{(ij),(kl)} = W_ik conj(W_jl), so both sums are single matrix products
    over the sample axis followed by an index permutation.
    """
    count, n, _ = ws.shape
    flat = ws.reshape(count, n * n)
    first = (flat.T @ flat.conj()).reshape(n, n, n, n).transpose(0, 2, 1, 3).reshape(n * n, n * n)
    power = np.abs(flat) ** 2
    second = (power.T @ power).reshape(n, n, n, n).transpose(0, 2, 1, 3).reshape(n * n, n * n)
    return first, second


def v_average_adjoint_mc(U: UnitaryMatrix, samples: int, rng: RngStream) -> AveragedAdjoint:
    """Haar Monte Carlo of ⟨Ad(VUV⁻¹)⟩_V with entrywise standard errors."""
    n = U.n

    def block(generator, count):
        vs = haar_batch(n, count, generator)
        return adjoint_moments(vs @ U.entries @ np.conj(np.swapaxes(vs, -1, -2)))

    mean, stderr = run_blocks(samples, rng, block)
    scheme = AveragingScheme(kind="basis", samples=samples)
    return AveragedAdjoint(matrix=mean, scheme=scheme, stderr=stderr)


def v_saddle_from_alpha(n: int, alpha_value: float, x, include_cn: bool = False,
                        mode: Literal["asymptotic", "exact"] = "asymptotic"):
    """
    Leading-order eigenbasis-averaged saddle contribution.

    asymptotic: 2N/(1 − α/N)^{N²} · sin(x(1/2 − α))/x
    exact: 2Re(e^{−ix/2} / ((1 − γ)(1 − γλ)^{N²−1})), λ = αN/(N² − 1), γ = e^{ix/N},
    which is averaged_standard_saddles of the closed-form ⟨Ad U⟩_V.
    """
    if alpha_value >= n:
        raise DomainError(f"alpha = {alpha_value:g} must be below N = {n}")
    xs = np.asarray(x, dtype=float)
    if mode == "asymptotic":
        prefactor = 2 * n * np.exp(-n * n * np.log1p(-alpha_value / n))
        shifted = 0.5 - alpha_value
        # sin(x s)/x with its x → 0 limit s
        value = prefactor * shifted * np.sinc(xs * shifted / np.pi)
    elif mode == "exact":
        if n < 2:
            raise UndefinedAverageError("the eigenbasis average needs N >= 2")
        m = n * n - 1
        lam = alpha_value * n / m
        at_origin = np.abs(xs) < 1e-12
        safe = np.where(at_origin, 1.0, xs)
        gamma = np.exp(1j * safe / n)
        denominator = (1 - gamma) * np.exp(m * np.log(1 - gamma * lam))
        value = 2 * np.real(np.exp(-0.5j * safe) / denominator)
        limit = ((n + 1) - 2 * m * lam / (1 - lam)) / (1 - lam) ** m
        value = np.where(at_origin, limit, value)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if include_cn:
        value = value * normalization_constant(n)
    return float(value) if np.ndim(value) == 0 else value


def v_saddle_correlator(U: UnitaryMatrix, x, include_cn: bool = False,
                        mode: Literal["asymptotic", "exact"] = "asymptotic"):
    return v_saddle_from_alpha(U.n, alpha(U), x, include_cn=include_cn, mode=mode)


def casimir_damping(n: int, kernel_time: float) -> np.ndarray:
    """e^{−2ϵp(N+1−p)} for p = 0..⌊N/2⌋."""
    if kernel_time < 0:
        raise DomainError(f"kernel time must be >= 0, got {kernel_time}")
    p = np.arange(n // 2 + 1)
    return np.exp(-2.0 * kernel_time * p * (n + 1 - p))


def isotropic_correlator(U: UnitaryMatrix, kernel_time: float, grid: GammaGrid) -> CorrelatorCurve:
    """Heat-kernel average of Ω: Tr ρ_p damped by e^{−2ϵp(N+1−p)} in the character sum."""
    scheme = AveragingScheme(kind="isotropic", epsilon=kernel_time)
    weights = character_traces(U).traces * casimir_damping(U.n, kernel_time)
    logger.debug("isotropic N=%d kernel_time=%g eps=N*kernel_time=%g", U.n, kernel_time, U.n * kernel_time)
    return omega_from_towers(weights, U.n, grid, route="character", scheme=scheme.label())


def isotropic_adjoint(U: UnitaryMatrix, kernel_time: float) -> AveragedAdjoint:
    """⟨Ad U⟩ = P_I + e^{−2Nϵ}(Ad U − P_I): the uniform mode is untouched."""
    scheme = AveragingScheme(kind="isotropic", epsilon=kernel_time)
    damping = casimir_damping(U.n, kernel_time)[1] if U.n >= 2 else 0.0
    projector = uniform_projector(U.n)
    matrix = projector + damping * (adjoint_operator(U) - projector)
    return AveragedAdjoint(matrix=matrix, scheme=scheme)


def default_generators(n: int) -> list[np.ndarray]:
    """Position- and momentum-type generators N·cos(q̂) and N·cos(p̂) on the n-site grid."""
    q = 2 * np.pi * np.arange(n) / n
    position = np.diag(n * np.cos(q)).astype(complex)
    f = fourier_matrix(n)
    momentum = f.conj().T @ position @ f
    return [position, 0.5 * (momentum + momentum.conj().T)]


def _exp_hermitian(hs: np.ndarray) -> np.ndarray:
    """e^{−iH} for a stack of Hermitian matrices."""
    values, vectors = np.linalg.eigh(hs)
    return (vectors * np.exp(-1j * values)[..., None, :]) @ np.conj(np.swapaxes(vectors, -1, -2))


def semiclassical_adjoint(U: UnitaryMatrix, generators: list[np.ndarray], width: float, samples: int,
                          rng: RngStream) -> AveragedAdjoint:
    """
    Monte Carlo mean of Ad(e^{−iΣ t_j H_j} U), t_j iid centred Gaussian with
    standard deviation width/√2 (density ∝ e^{−Σ t²/width²}).
    """
    scheme = AveragingScheme(kind="semiclassical", generators=list(generators), width=width, samples=samples)
    stack = np.array([np.asarray(h, dtype=complex) for h in generators])
    if stack.shape[1:] != (U.n, U.n):
        raise ValueError(f"generators must be {U.n}x{U.n}")
    sigma = width / np.sqrt(2)

    def block(generator, count):
        ts = generator.normal(0.0, sigma, size=(count, len(stack)))
        kicks = _exp_hermitian(np.einsum("sj,jab->sab", ts, stack))
        return adjoint_moments(kicks @ U.entries)

    mean, stderr = run_blocks(samples, rng, block)
    return AveragedAdjoint(matrix=mean, scheme=scheme, stderr=stderr)


def averaged_adjoint(U: UnitaryMatrix, scheme: AveragingScheme, rng: Optional[RngStream] = None) -> AveragedAdjoint:
    """⟨Ad U⟩ under ``scheme``; sampled schemes need ``rng``."""
    if scheme.kind == "none":
        return AveragedAdjoint(matrix=adjoint_operator(U), scheme=scheme)
    if scheme.kind == "basis":
        if scheme.samples is None:
            return v_average_adjoint(U)
        if rng is None:
            raise ValueError("a sampled eigenbasis average needs a seed")
        return v_average_adjoint_mc(U, scheme.samples, rng)
    if scheme.kind == "isotropic":
        return isotropic_adjoint(U, scheme.epsilon)
    if scheme.kind == "semiclassical":
        if rng is None:
            raise ValueError("the semiclassical average needs a seed")
        return semiclassical_adjoint(U, scheme.generators, scheme.width, scheme.samples, rng)
    raise ValueError(f"scheme {scheme.kind!r} has no averaged adjoint for a single U")


def ensemble_variances(kind: Literal["poisson", "cue"], n: int) -> list[int]:
    """⟨|a_k|²⟩ as exact integers: C(N,k) for Poisson, 1 for CUE."""
    if kind == "poisson":
        return [comb(n, k) for k in range(n + 1)]
    if kind == "cue":
        return [1] * (n + 1)
    raise ValueError(f"unknown ensemble {kind!r}")


def log_ensemble_variances(kind: Literal["poisson", "cue"], n: int) -> np.ndarray:
    """log⟨|a_k|²⟩ in floating point; finite for any N."""
    k = np.arange(n + 1)
    if kind == "poisson":
        return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    if kind == "cue":
        return np.zeros(n + 1)
    raise ValueError(f"unknown ensemble {kind!r}")


def _batch(kind: str, n: int, count: int, generator: np.random.Generator) -> np.ndarray:
    if kind == "poisson":
        return poisson_batch(n, count, generator)
    if kind == "cue":
        return haar_batch(n, count, generator)
    raise ValueError(f"unknown ensemble {kind!r}")


def batch_variances(us: np.ndarray) -> np.ndarray:
    """|a_k|² for a stack of unitaries, shape (S, N+1)."""
    eigenvalues = np.linalg.eigvals(us)
    count, n = eigenvalues.shape
    a = np.zeros((count, n + 1), dtype=complex)
    a[:, 0] = 1.0
    for m in range(1, n + 1):
        a[:, 1:m + 1] = a[:, 1:m + 1] - eigenvalues[:, m - 1:m] * a[:, 0:m]
    return np.abs(a) ** 2


def ensemble_variances_mc(kind: Literal["poisson", "cue"], n: int, samples: int,
                          rng: RngStream) -> tuple[np.ndarray, np.ndarray]:
    """Sampled ⟨|a_k|²⟩ with standard errors."""

    def block(generator, count):
        values = batch_variances(_batch(kind, n, count, generator))
        return values.sum(axis=0), (values ** 2).sum(axis=0)

    mean, stderr = run_blocks(samples, rng, block)
    return np.real(mean), stderr


def ensemble_correlator(kind: Literal["poisson", "cue"], n: int, grid: GammaGrid,
                        samples: Optional[int] = None, rng: Optional[RngStream] = None) -> CorrelatorCurve:
    """
    ⟨Ω⟩ over the Poisson or CUE ensemble.

    Without ``samples`` the analytic Σ_k γ^{k−N/2}⟨|a_k|²⟩ is returned; with it,
    the mean of Ω over sampled matrices, with pointwise standard errors.
    """
    label = AveragingScheme(kind="ensemble", ensemble=kind, samples=samples).label()
    if samples is None:
        logs = log_ensemble_variances(kind, n)
        shift = float(np.max(logs))
        return omega_from_variances(np.exp(logs - shift), n, grid, route="secular", scheme=label, log_scale=shift)
    if rng is None:
        raise ValueError("a sampled ensemble average needs a seed")
    powers = secular_powers(grid, n)

    def block(generator, count):
        omegas = batch_variances(_batch(kind, n, count, generator)) @ powers.T
        return omegas.sum(axis=0), (np.abs(omegas) ** 2).sum(axis=0)

    mean, stderr = run_blocks(samples, rng, block)
    logger.info("ensemble %s N=%d: %d samples over %d grid points", kind, n, samples, len(grid))
    return CorrelatorCurve(grid=grid, n=n, values=mean, route="mc", scheme=label, stderr=stderr)
