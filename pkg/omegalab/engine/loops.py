"""
One- and two-loop corrections around the standard saddle by exhaustive Wick pairing.

Under the weight e^{−Tr ζ†(1−T)ζ} the only contractions are
⟨ζ_a ζ̄_b⟩ = G_ab and ⟨(Tζ)_a ζ̄_b⟩ = (TG)_ab with G = (1 − T)^{−1} on row-major
vec(ζ). A trace word such as "IT" stands for Tr ζ†ζ ζ†(Tζ); a monomial is a
product of words with a rational coefficient.
"""
import logging
from fractions import Fraction
from itertools import permutations
from string import ascii_letters

import numpy as np

from omegalab.core.config import settings
from omegalab.core.errors import OracleScaleError, SaddleDegeneracyError

logger = logging.getLogger(__name__)


def loop_terms(n: int, order: int) -> list[tuple[Fraction, tuple[str, ...]]]:
    """(coefficient, words) of f₁ or f₂."""
    half, third, eighth, quarter = Fraction(1, 2), Fraction(1, 3), Fraction(1, 8), Fraction(1, 4)
    if order == 1:
        return [
            (half, ("II",)),
            (-half, ("TT",)),
            (Fraction(-2 * n), ("I",)),
        ]
    if order == 2:
        return [
            (-third, ("III",)),
            (third, ("TTT",)),
            (eighth, ("II", "II")),
            (-quarter, ("II", "TT")),
            (eighth, ("TT", "TT")),
            (Fraction(2 * n * n), ("I", "I")),
            (Fraction(n), ("II",)),
            (Fraction(-n), ("I", "II")),
            (Fraction(n), ("I", "TT")),
        ]
    raise ValueError(f"loop order must be 1 or 2, got {order}")


def loop_constant(n: int, order: int) -> Fraction:
    """T-independent value of ⟨f⟩: −N³ at one loop, N⁶/2 + 7N⁴/12 − N²/12 at two loops."""
    if order == 1:
        return Fraction(-n ** 3)
    if order == 2:
        return Fraction(n ** 6, 2) + Fraction(7 * n ** 4, 12) - Fraction(n ** 2, 12)
    raise ValueError(f"loop order must be 1 or 2, got {order}")


def _propagators(T: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    size = T.shape[0]
    system = np.eye(size) - T
    if np.linalg.cond(system) > 1e12:
        raise SaddleDegeneracyError("1 - T is singular; the Gaussian weight is not normalizable")
    g = np.linalg.inv(system)
    return g, T @ g


def _monomial_moment(words: tuple[str, ...], propagators: dict[str, np.ndarray]) -> complex:
    """
    ⟨∏_w Tr ∏_s ζ†(A_s ζ)⟩ as a permanent over the pairings of ζ-type and ζ̄-type factors.

    Factor s of a word contributes ζ̄_{d_s c_s} (A_s ζ)_{d_s c_{s+1}}, with s+1 cyclic within the word.
    """
    labels, holomorphic, antiholomorphic = [], [], []
    letters = iter(ascii_letters)
    for word in words:
        cs = [next(letters) for _ in word]
        ds = [next(letters) for _ in word]
        for s, kind in enumerate(word):
            labels.append(kind)
            holomorphic.append(ds[s] + cs[(s + 1) % len(word)])
            antiholomorphic.append(ds[s] + cs[s])

    total = 0j
    for pairing in permutations(range(len(labels))):
        operands, subscripts = [], []
        for s, t in enumerate(pairing):
            operands.append(propagators[labels[s]])
            subscripts.append(holomorphic[s] + antiholomorphic[t])
        total += np.einsum(",".join(subscripts) + "->", *operands, optimize=True)
    return complex(total)


def wick_expectation(T: np.ndarray, order: int) -> complex:
    """⟨f_order⟩ under the normalized weight e^{−Tr ζ†(1−T)ζ}."""
    T = np.asarray(T, dtype=complex)
    n = int(round(np.sqrt(T.shape[0])))
    if n * n != T.shape[0] or T.shape[0] != T.shape[1]:
        raise ValueError(f"T must be N^2 x N^2, got {T.shape}")
    if n > settings.WICK_MAX_N:
        raise OracleScaleError(f"Wick enumeration capped at N={settings.WICK_MAX_N}, got N={n}")
    g, tg = _propagators(T)
    shape = (n, n, n, n)
    propagators = {"I": g.reshape(shape), "T": tg.reshape(shape)}
    value = sum(float(coeff) * _monomial_moment(words, propagators) for coeff, words in loop_terms(n, order))
    logger.debug("wick order=%d N=%d <f>=%s", order, n, value)
    return complex(value)


def loop_corrections(T: np.ndarray, order: int) -> complex:
    """⟨f_order⟩ · Det(1 − T)^{−1}."""
    T = np.asarray(T, dtype=complex)
    expectation = wick_expectation(T, order)
    return complex(expectation / np.linalg.det(np.eye(T.shape[0]) - T))


def _word_value(zetas: np.ndarray, t_zetas: np.ndarray, word: str) -> np.ndarray:
    zh = np.conj(np.swapaxes(zetas, -1, -2))
    product = None
    for kind in word:
        factor = zh @ (zetas if kind == "I" else t_zetas)
        product = factor if product is None else product @ factor
    return np.trace(product, axis1=-2, axis2=-1)


def loop_integrand(zetas: np.ndarray, T: np.ndarray, order: int) -> np.ndarray:
    """f_order evaluated directly on a stack of fields ζ, shape (S, N, N)."""
    zetas = np.asarray(zetas, dtype=complex)
    count, n, _ = zetas.shape
    t_zetas = (zetas.reshape(count, n * n) @ np.asarray(T).T).reshape(count, n, n)
    words = {}
    out = np.zeros(count, dtype=complex)
    for coeff, monomial in loop_terms(n, order):
        value = np.full(count, float(coeff), dtype=complex)
        for word in monomial:
            if word not in words:
                words[word] = _word_value(zetas, t_zetas, word)
            value *= words[word]
        out += value
    return out


def sample_gaussian_fields(T: np.ndarray, count: int, generator: np.random.Generator) -> np.ndarray:
    """Draws ζ with density ∝ e^{−vec(ζ)†(1−T)vec(ζ)}; needs 1 − T Hermitian positive definite."""
    T = np.asarray(T, dtype=complex)
    size = T.shape[0]
    n = int(round(np.sqrt(size)))
    covariance = np.linalg.inv(np.eye(size) - T)
    factor = np.linalg.cholesky(0.5 * (covariance + covariance.conj().T))
    white = (generator.standard_normal((count, size)) + 1j * generator.standard_normal((count, size))) / np.sqrt(2)
    return (white @ factor.T).reshape(count, n, n)
