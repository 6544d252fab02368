"""
Tests for the one- and two-loop corrections: exact constants, Wick pairing and
a Monte Carlo cross-check of the integrand
"""
from fractions import Fraction

import numpy as np
import pytest

from omegalab.core.errors import OracleScaleError, SaddleDegeneracyError
from omegalab.engine.loops import (
    loop_constant, loop_corrections, loop_integrand, loop_terms, sample_gaussian_fields, wick_expectation,
)
from omegalab.engine.unitary import adjoint_operator, haar_sample
from omegalab.schemas.matrix import RngStream


def test_loop_constants_table():
    """−N³ a un lazo y N⁶/2 + 7N⁴/12 − N²/12 a dos lazos"""
    assert loop_constant(2, 1) == -8
    assert loop_constant(1, 2) == 1
    assert loop_constant(2, 2) == 41
    assert loop_constant(3, 2) == Fraction(729, 2) + Fraction(567, 12) - Fraction(9, 12)


def test_unknown_order_rejected():
    with pytest.raises(ValueError):
        loop_terms(2, 3)
    with pytest.raises(ValueError):
        loop_constant(2, 0)


@pytest.mark.parametrize("n,order", [(1, 1), (2, 1), (3, 1), (1, 2), (2, 2)])
def test_wick_expectation_at_zero_coupling(n, order):
    value = wick_expectation(np.zeros((n * n, n * n)), order)
    assert value == pytest.approx(float(loop_constant(n, order)), rel=1e-10)


@pytest.mark.parametrize("n,order", [(1, 1), (2, 1), (3, 1), (1, 2), (2, 2)])
def test_wick_expectation_is_independent_of_u(n, order):
    """Para T = c·Ad U el valor esperado no depende de U ni de c"""
    U = haar_sample(n, RngStream(seed=60 + n))
    T = 0.5 * np.exp(0.9j) * adjoint_operator(U)
    value = wick_expectation(T, order)
    assert value == pytest.approx(float(loop_constant(n, order)), rel=1e-8)


def random_coupling(n: int, generator: np.random.Generator) -> np.ndarray:
    size = n * n
    return 0.3 * (generator.normal(size=(size, size)) + 1j * generator.normal(size=(size, size))) / size


@pytest.mark.parametrize("n", [1, 2, 3])
def test_one_loop_is_independent_of_random_coupling(n):
    """Cinco T complejos arbitrarios dan el mismo −N³"""
    generator = RngStream(seed=500 + n).generator()
    for _ in range(5):
        T = random_coupling(n, generator)
        value = wick_expectation(T, 1)
        assert value == pytest.approx(-n ** 3, rel=1e-8)
        assert loop_corrections(T, 1) * np.linalg.det(np.eye(n * n) - T) == pytest.approx(-n ** 3, rel=1e-8)


def test_loop_corrections_divide_by_determinant():
    U = haar_sample(2, RngStream(seed=4))
    T = 0.3 * adjoint_operator(U)
    expected = -8 / np.linalg.det(np.eye(4) - T)
    assert loop_corrections(T, 1) == pytest.approx(expected, rel=1e-8)


def test_wick_is_capped():
    with pytest.raises(OracleScaleError):
        wick_expectation(np.zeros((16, 16)), 1)


def test_singular_weight_raises():
    with pytest.raises(SaddleDegeneracyError):
        wick_expectation(np.eye(4), 1)


def test_rejects_non_square_dimension():
    with pytest.raises(ValueError):
        wick_expectation(np.zeros((5, 5)), 1)


def test_integrand_for_one_mode():
    """N = 1, T = 0: f₁ = |ζ|⁴/2 − 2|ζ|²"""
    zetas = np.array([[[1.5 - 0.5j]], [[0.2j]]])
    modulus = np.abs(zetas[:, 0, 0]) ** 2
    values = loop_integrand(zetas, np.zeros((1, 1)), 1)
    assert np.allclose(values, 0.5 * modulus ** 2 - 2 * modulus)


@pytest.mark.parametrize("order", [1, 2])
def test_monte_carlo_matches_wick(order):
    """El promedio muestral de f sobre campos gaussianos coincide con el emparejamiento de Wick"""
    n = 2
    T = 0.4 * np.eye(n * n)
    fields = sample_gaussian_fields(T, 200_000, RngStream(seed=90 + order).generator())
    values = loop_integrand(fields, T, order)
    mean = values.mean()
    stderr = np.sqrt(values.real.var() + values.imag.var()) / np.sqrt(len(values))
    z = abs(mean - wick_expectation(T, order)) / stderr
    assert z < 4.5, f"z = {z:.2f}"


def test_gaussian_fields_have_the_right_covariance():
    T = 0.25 * np.eye(4)
    fields = sample_gaussian_fields(T, 50_000, RngStream(seed=12).generator()).reshape(-1, 4)
    covariance = fields.T @ fields.conj() / len(fields)
    assert np.allclose(covariance, np.eye(4) / 0.75, atol=0.05)
