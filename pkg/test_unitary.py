"""
Tests for unitary-matrix construction, sampling, eigenphases and secular coefficients
"""
import numpy as np
import pytest
from pydantic import ValidationError

from omegalab.engine.unitary import (
    adjoint_operator, eigenphases, fourier_matrix, haar_batch, haar_sample, kicked_map, make_unitary,
    newton_coefficients, poisson_sample, power_traces, product_coefficients, secular_coefficients,
    secular_coefficients_from_traces,
)
from omegalab.schemas.matrix import RngStream, SecularCoefficients


@pytest.fixture
def rng():
    """Flujo aleatorio fijo para las pruebas"""
    return RngStream(seed=2024)


def test_make_unitary_rejects_non_unitary():
    """Una matriz no unitaria no pasa la validación"""
    with pytest.raises(ValidationError):
        make_unitary([[1.0, 0.1], [0.0, 1.0]])


def test_make_unitary_rejects_non_square():
    with pytest.raises(ValidationError):
        make_unitary(np.ones((2, 3)))


def test_make_unitary_records_residual_and_relaxed_tolerance():
    """El residuo se guarda y una tolerancia más laxa acepta matrices casi unitarias"""
    almost = np.eye(2) + 1e-9
    with pytest.raises(ValidationError):
        make_unitary(almost)
    matrix = make_unitary(almost, tol=1e-8)
    assert matrix.residual > 0
    assert matrix.residual < 1e-8


def test_haar_sample_is_reproducible(rng):
    """Same (seed, stream) reproduces the same matrix, another stream does not"""
    first = haar_sample(4, rng)
    again = haar_sample(4, RngStream(seed=2024))
    other = haar_sample(4, rng.substream(1))
    assert np.array_equal(first.entries, again.entries)
    assert not np.allclose(first.entries, other.entries)


def test_haar_batch_moments(rng):
    """E|U_11|² = 1/N and E|Tr U|² = 1 under Haar measure"""
    us = haar_batch(3, 20_000, rng.generator())
    assert np.mean(np.abs(us[:, 0, 0]) ** 2) == pytest.approx(1 / 3, abs=0.01)
    traces = np.abs(np.trace(us, axis1=1, axis2=2)) ** 2
    assert np.mean(traces) == pytest.approx(1.0, abs=0.05)


def test_poisson_sample_is_diagonal(rng):
    U = poisson_sample(5, rng)
    off = U.entries - np.diag(np.diag(U.entries))
    assert np.max(np.abs(off)) == 0
    assert np.allclose(np.abs(np.diag(U.entries)), 1.0)


def test_builtin_maps_are_unitary():
    """El mapa de Fourier y el mapa con patadas son unitarios"""
    assert make_unitary(fourier_matrix(7)).residual < 1e-12
    kicked = kicked_map(6, [0.3, 0.1])
    assert kicked.n == 6
    assert kicked.residual < 1e-12


def test_eigenphases_sorted_in_range(rng):
    spectrum = eigenphases(haar_sample(6, rng))
    assert spectrum.n == 6
    assert np.all(spectrum.thetas >= 0) and np.all(spectrum.thetas < 2 * np.pi)
    assert np.all(np.diff(spectrum.thetas) >= 0)
    assert spectrum.residual <= 1e-9


def test_eigenphases_of_diagonal_matrix():
    phases = np.array([0.3, 2.0, 5.5])
    spectrum = eigenphases(make_unitary(np.diag(np.exp(1j * phases))))
    assert np.allclose(spectrum.thetas, phases, atol=1e-12)


def test_secular_coefficients_of_diagonal_pair():
    """Det(1 − sU) = 1 − s(e^{ia} + e^{ib}) + s² e^{i(a+b)}"""
    a, b = 0.4, 1.9
    coeffs = secular_coefficients(make_unitary(np.diag(np.exp(1j * np.array([a, b])))))
    expected = [1, -(np.exp(1j * a) + np.exp(1j * b)), np.exp(1j * (a + b))]
    assert np.allclose(coeffs.a, expected, atol=1e-13)


def test_secular_coefficients_of_identity():
    """For U = I the coefficients are (−1)^k C(N,k)"""
    coeffs = secular_coefficients(make_unitary(np.eye(6)))
    assert np.allclose(coeffs.a, [1, -6, 15, -20, 15, -6, 1])


def test_newton_and_product_agree(rng):
    """Both recursions give the same coefficients"""
    U = haar_sample(12, rng)
    newton = secular_coefficients(U, method="newton").a
    product = secular_coefficients(U, method="product").a
    assert np.allclose(newton, product, atol=1e-10)


def test_newton_helpers_directly(rng):
    eigenvalues = np.exp(1j * rng.generator().uniform(0, 2 * np.pi, 5))
    a = newton_coefficients(power_traces(eigenvalues, 5), 5)
    assert np.allclose(a, product_coefficients(eigenvalues), atol=1e-12)


def test_trace_determinant_oracle(rng):
    """La fórmula de determinantes en las sumas de potencias coincide con la recursión"""
    U = haar_sample(5, rng)
    assert np.allclose(secular_coefficients_from_traces(U), secular_coefficients(U).a, atol=1e-10)


def test_unknown_method_rejected(rng):
    with pytest.raises(ValueError):
        secular_coefficients(haar_sample(2, rng), method="qr")


def test_self_inversive_identity_enforced():
    """Coeficientes que violan a_{N−k} = Det(−U) conj(a_k) se rechazan"""
    with pytest.raises(ValidationError):
        SecularCoefficients(a=np.array([1.0, 0.5, 1.0], dtype=complex), det_u=1.0)


def test_self_inversive_identity_holds(rng):
    U = haar_sample(7, rng)
    coeffs = secular_coefficients(U)
    mirror = (-1) ** 7 * U.det() * np.conj(coeffs.a[::-1])
    assert np.allclose(coeffs.a, mirror, atol=1e-10)


def test_adjoint_operator_acts_on_row_major_vec(rng):
    """vec(U Z U†) = Ad U · vec(Z)"""
    U = haar_sample(3, rng)
    z = rng.generator(1).standard_normal((3, 3)) + 1j * rng.generator(2).standard_normal((3, 3))
    direct = (U.entries @ z @ U.entries.conj().T).reshape(-1)
    assert np.allclose(adjoint_operator(U) @ z.reshape(-1), direct)
