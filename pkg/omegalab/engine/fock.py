"""
Brute-force Fock-space oracle on the balanced subspace F of 2N fermion modes.

Jordan–Wigner convention: modes are ordered +1..+N, −1..−N (bits 0..2N−1);
a ladder operator on mode m carries the parity of the occupied modes below m.
"""
import logging
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np
from scipy.linalg import expm, logm

from omegalab.core.config import settings
from omegalab.core.errors import LogBranchError, OracleScaleError
from omegalab.schemas.fock import FockBasis, FockOperator
from omegalab.schemas.matrix import UnitaryMatrix

logger = logging.getLogger(__name__)

# ψ-string entry: (mode, dagger)
Ladder = tuple[int, bool]


def build_basis(n: int) -> FockBasis:
    if n < 1:
        raise ValueError("N must be at least 1")
    if n > settings.FOCK_MAX_N:
        raise OracleScaleError(
            f"oracle scale exceeded: N={n} > {settings.FOCK_MAX_N} (dim F = {comb(2 * n, n)})"
        )
    states = []
    for k in range(n + 1):
        for plus in combinations(range(n), k):
            for minus in combinations(range(n, 2 * n), k):
                states.append(sum(1 << m for m in plus + minus))

    def key(state: int) -> str:
        return "".join(str((state >> m) & 1) for m in range(2 * n))

    return FockBasis(n=n, states=tuple(sorted(states, key=key)))


def apply_ladder(state: int, mode: int, dagger: bool):
    """Apply f†_mode (dagger) or f_mode; returns (sign, new_state) or None if it annihilates."""
    occupied = (state >> mode) & 1
    if occupied == dagger:
        return None
    sign = -1 if (state & ((1 << mode) - 1)).bit_count() % 2 else 1
    return sign, state ^ (1 << mode)


def string_matrix(basis: FockBasis, ladders: list[Ladder]) -> np.ndarray:
    """Matrix of the operator product ladders[0]·ladders[1]·… restricted to F."""
    index = basis.index()
    out = np.zeros((basis.dim, basis.dim))
    for col, state in enumerate(basis.states):
        sign = 1
        current = state
        for mode, dagger in reversed(ladders):
            result = apply_ladder(current, mode, dagger)
            if result is None:
                break
            step, current = result
            sign *= step
        else:
            out[index[current], col] += sign
    return out


def _psi(n: int, mu: int, dagger: bool) -> Ladder:
    """ψ_μ = f_{+μ} for μ < N and f†_{−(μ−N)} otherwise; ψ†_μ is its adjoint."""
    if mu < n:
        return (mu, dagger)
    return (mu, not dagger)


@lru_cache(maxsize=None)
def _elementary_cached(n: int) -> np.ndarray:
    basis = build_basis(n)
    size = 2 * n
    tensor = np.zeros((size, size, basis.dim, basis.dim))
    for mu in range(size):
        for nu in range(size):
            tensor[mu, nu] = string_matrix(basis, [_psi(n, mu, True), _psi(n, nu, False)])
    return tensor


def elementary_operators(basis: FockBasis) -> np.ndarray:
    """E[μ, ν] = ψ†_μ ψ_ν on F, shape (2N, 2N, dim F, dim F)."""
    return _elementary_cached(basis.n)


def rep_lie(X: np.ndarray, basis: FockBasis) -> FockOperator:
    """
    R(X) = Σ a_ij f†₊ᵢf₊ⱼ + b_ij f†₊ᵢf†₋ⱼ + c_ij f₋ᵢf₊ⱼ + d_ij f₋ᵢf†₋ⱼ for X = [[a, b], [c, d]].
    """
    X = np.asarray(X, dtype=complex)
    if X.shape != (2 * basis.n, 2 * basis.n):
        raise ValueError(f"expected a {2 * basis.n}x{2 * basis.n} matrix, got {X.shape}")
    matrix = np.einsum("mn,mnab->ab", X, elementary_operators(basis))
    return FockOperator(basis=basis, matrix=matrix)


def number_operators(basis: FockBasis) -> tuple[np.ndarray, np.ndarray]:
    return np.diag(basis.plus_numbers()).astype(float), np.diag(basis.minus_numbers()).astype(float)


def _rotate_off_branch_cut(entries: np.ndarray) -> np.ndarray:
    """Global phase sending the centre of the widest eigenphase gap to π."""
    phases = np.sort(np.mod(np.angle(np.linalg.eigvals(entries)), 2 * np.pi))
    gaps = np.diff(np.append(phases, phases[0] + 2 * np.pi))
    widest = int(np.argmax(gaps))
    centre = phases[widest] + gaps[widest] / 2
    logger.warning("eigenvalue near -1: rotating U by exp(i*%.6f) before taking the logarithm", np.pi - centre)
    return np.exp(1j * (np.pi - centre)) * entries


def principal_log(U: UnitaryMatrix) -> np.ndarray:
    entries = U.entries
    if np.any(np.abs(np.linalg.eigvals(entries) + 1) < 1e-6):
        # Ω is invariant under U → e^{iα}U on F, so no compensation is needed
        entries = _rotate_off_branch_cut(entries)
    log_u = logm(entries)
    if not np.all(np.isfinite(log_u)) or np.max(np.abs(expm(log_u) - entries)) > 1e-8:
        raise LogBranchError("matrix logarithm failed; rotate U by a global phase and retry")
    return log_u


def trace_exponent(log_u: np.ndarray, basis: FockBasis) -> np.ndarray:
    """A = Σ_ij L_ij (f†₊ᵢf₊ⱼ − f†₋ⱼf₋ᵢ) on F."""
    n = basis.n
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for i in range(n):
        for j in range(n):
            if log_u[i, j] == 0:
                continue
            plus = string_matrix(basis, [(i, True), (j, False)])
            minus = string_matrix(basis, [(n + j, True), (n + i, False)])
            out += log_u[i, j] * (plus - minus)
    return out


def character_trace(U: UnitaryMatrix, gamma: complex, basis: FockBasis) -> complex:
    """Ω = Tr_F γ^{(F₊+F₋−N)/2} exp Σ (log U)_ij (f†₊ᵢf₊ⱼ − f†₋ⱼf₋ᵢ)."""
    if U.n != basis.n:
        raise ValueError(f"matrix dimension {U.n} does not match basis N={basis.n}")
    exponent = trace_exponent(principal_log(U), basis)
    j0 = basis.plus_numbers() + basis.minus_numbers() - basis.n
    weights = np.exp(0.5 * j0 * np.log(complex(gamma)))
    return complex(np.sum(weights * np.diag(expm(exponent))))


def su2_generators(basis: FockBasis) -> tuple[FockOperator, FockOperator, FockOperator]:
    """J↑ = Σ f†₊ᵢf†₋ᵢ, J↓ = Σ f₋ᵢf₊ᵢ, J₀ = F₊ + F₋ − N."""
    n = basis.n
    j_up = sum(string_matrix(basis, [(i, True), (n + i, True)]) for i in range(n))
    j_down = sum(string_matrix(basis, [(n + i, False), (i, False)]) for i in range(n))
    f_plus, f_minus = number_operators(basis)
    j_zero = f_plus + f_minus - n * np.eye(basis.dim)
    return (
        FockOperator(basis=basis, matrix=j_up),
        FockOperator(basis=basis, matrix=j_down),
        FockOperator(basis=basis, matrix=j_zero),
    )


def laplacian(basis: FockBasis) -> FockOperator:
    """Δ|_F = (N+1)(F₊+F₋) − (F₊² + F₋²) − 2 J↑J↓."""
    n = basis.n
    f_plus, f_minus = number_operators(basis)
    j_up, j_down, _ = su2_generators(basis)
    matrix = (n + 1) * (f_plus + f_minus) - (f_plus @ f_plus + f_minus @ f_minus) - 2 * j_up.matrix @ j_down.matrix
    return FockOperator(basis=basis, matrix=matrix)


def laplacian_spectrum(basis: FockBasis) -> dict[int, int]:
    """Eigenvalues of Δ rounded to integers, with multiplicities."""
    eigenvalues = np.linalg.eigvalsh(laplacian(basis).matrix)
    rounded = np.rint(eigenvalues).astype(int)
    if np.max(np.abs(eigenvalues - rounded)) > 1e-9:
        raise ValueError("Laplacian spectrum is not integral")
    values, counts = np.unique(rounded, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


def expected_laplacian_spectrum(n: int) -> dict[int, int]:
    """{2p(N+1−p): (N−2p+1)(C(N,p)² − C(N,p−1)²)} for p = 0..⌊N/2⌋."""
    table = {}
    for p in range(n // 2 + 1):
        below = comb(n, p - 1) if p else 0
        table[2 * p * (n + 1 - p)] = (n - 2 * p + 1) * (comb(n, p) ** 2 - below ** 2)
    return table
