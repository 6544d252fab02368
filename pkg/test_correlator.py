"""
Tests for the exact correlator Ω_U(γ): secular route, character route and quadrature
"""
from math import comb

import numpy as np
import pytest
from pydantic import ValidationError

from omegalab.core.errors import GridPoleError
from omegalab.engine.averaging import ensemble_correlator, log_ensemble_variances
from omegalab.engine.correlator import (
    character_traces, multiplet_factor, multiplet_matrix, omega_character, omega_quadrature, omega_secular,
)
from omegalab.engine.unitary import haar_sample, make_unitary, secular_coefficients
from omegalab.schemas.curve import CharacterTraces, GammaGrid, irrep_dimension
from omegalab.schemas.matrix import RngStream


@pytest.fixture
def rng():
    return RngStream(seed=11)


@pytest.fixture
def mixed_grid():
    """Puntos dentro, fuera y sobre el círculo unidad"""
    return GammaGrid.from_gamma([0.9, 1.0, 1.3, 0.5 + 0.5j, np.exp(0.7j), 2.0 - 1.0j])


def test_grid_rejects_gamma_zero():
    with pytest.raises(ValidationError):
        GammaGrid.from_gamma([1.0, 0.0])


def test_grid_rejects_complex_x():
    with pytest.raises(ValidationError):
        GammaGrid.from_x([0.5 + 1j])


def test_x_grid_maps_to_unit_circle():
    grid = GammaGrid.x_range(0, 10, 11)
    assert grid.on_unit_circle()
    assert np.allclose(grid.gammas(5), np.exp(1j * np.linspace(0, 10, 11) / 5))
    assert np.allclose(grid.xs(5), np.linspace(0, 10, 11))


def test_omega_at_one_is_sum_of_variances(rng):
    """Ω(1) = Σ_k |a_k|²"""
    U = haar_sample(5, rng)
    omega = omega_secular(U, GammaGrid.from_gamma([1.0])).values[0]
    assert omega == pytest.approx(np.sum(secular_coefficients(U).variances()), rel=1e-12)


def test_omega_of_identity_is_central_binomial():
    """Para U = I, Ω(1) = Σ C(N,k)² = C(2N,N)"""
    U = make_unitary(np.eye(7))
    omega = omega_secular(U, GammaGrid.from_gamma([1.0])).values[0]
    assert omega.real == pytest.approx(comb(14, 7), rel=1e-12)


@pytest.mark.parametrize("n", range(1, 9))
def test_secular_and_character_routes_agree(n, mixed_grid):
    """Both exact routes give the same curve off and on the unit circle"""
    U = haar_sample(n, RngStream(seed=100 + n))
    secular = omega_secular(U, mixed_grid).values
    character = omega_character(U, mixed_grid).values
    scale = max(1.0, float(np.max(np.abs(secular))))
    assert np.max(np.abs(secular - character)) / scale < 1e-9


@pytest.mark.parametrize("n", [1, 2, 5])
def test_quadrature_agrees_with_secular(n, mixed_grid):
    U = haar_sample(n, RngStream(seed=200 + n))
    secular = omega_secular(U, mixed_grid).values
    for k, gamma in enumerate(mixed_grid.points):
        assert omega_quadrature(U, gamma) == pytest.approx(secular[k], rel=1e-9, abs=1e-9)


def test_omega_is_real_on_unit_circle(rng):
    """Sobre |γ| = 1 la curva es real"""
    U = haar_sample(6, rng)
    curve = omega_secular(U, GammaGrid.x_range(-20, 20, 81))
    assert curve.max_imag_ratio() < 1e-12


def test_omega_positive_on_positive_axis(rng):
    U = haar_sample(4, rng)
    curve = omega_secular(U, GammaGrid.from_gamma([0.2, 0.7, 1.0, 3.5]))
    assert np.all(curve.values.real > 0)
    assert np.max(np.abs(curve.values.imag)) < 1e-12


def test_character_traces_of_identity_are_dimensions():
    """Tr ρ_p(I) = dim ρ_p = C(N,p)² − C(N,p−1)²"""
    traces = character_traces(make_unitary(np.eye(6)))
    assert np.allclose(traces.traces, traces.dimensions())
    assert traces.dimensions() == [1, 35, 189, 175]


def test_character_trace_bound_enforced():
    with pytest.raises(ValidationError):
        CharacterTraces(n=2, traces=np.array([1.0, 5.0]))


def test_character_traces_bounded_for_random_matrix(rng):
    traces = character_traces(haar_sample(8, rng))
    assert traces.traces[0] == pytest.approx(1.0)
    for p, value in enumerate(traces.traces):
        assert abs(value) <= irrep_dimension(8, p) + 1e-8


def test_multiplet_factor_at_origin():
    """El punto removible x = 0 da N − 2p + 1"""
    assert multiplet_factor(6, 0, 0.0) == pytest.approx(7)
    assert multiplet_factor(6, 2, 0.0) == pytest.approx(3)


def test_multiplet_factor_matches_geometric_sum():
    n, p, x = 5, 1, 2.3
    gamma = np.exp(1j * x / n)
    geometric = sum(gamma ** (k - n / 2) for k in range(p, n - p + 1))
    assert multiplet_factor(n, p, x) == pytest.approx(geometric.real, rel=1e-12)
    assert abs(geometric.imag) < 1e-12


def test_multiplet_matrix_gamma_mode_has_no_pole_at_one():
    matrix = multiplet_matrix(GammaGrid.from_gamma([1.0]), 4)
    assert np.allclose(matrix[0], [5, 3, 1])


def test_multiplet_factor_pole_raises():
    """x = 2πN is a genuine pole of the sine form"""
    with pytest.raises(GridPoleError):
        multiplet_factor(3, 0, np.array([1.0, 2 * np.pi * 3]))


def test_multiplet_factor_rejects_bad_tower():
    with pytest.raises(ValueError):
        multiplet_factor(4, 3, 0.5)


def test_poisson_average_at_one():
    """⟨Ω(1)⟩_Poisson = 2^N"""
    curve = ensemble_correlator("poisson", 10, GammaGrid.from_gamma([1.0]))
    assert curve.scaled_values()[0].real == pytest.approx(2 ** 10)


def test_poisson_average_large_n_stays_finite():
    """N = 1100: C(N,k) desborda el float; la curva se da con log_scale"""
    n = 1100
    curve = ensemble_correlator("poisson", n, GammaGrid.from_x([0.0, 2.5, 7.0]))
    assert np.all(np.isfinite(curve.values))
    assert curve.log_scale > 700
    assert np.log(curve.values[0].real) + curve.log_scale == pytest.approx(n * np.log(2), rel=1e-12)
    assert log_ensemble_variances("poisson", 4) == pytest.approx(np.log([1, 4, 6, 4, 1]))


def test_cue_average_is_sinc():
    """⟨Ω⟩_CUE = sin((N+1)x/2N)/sin(x/2N)"""
    n = 8
    grid = GammaGrid.x_range(0.1, 20, 50)
    curve = ensemble_correlator("cue", n, grid)
    xs = grid.points
    expected = np.sin((n + 1) * xs / (2 * n)) / np.sin(xs / (2 * n))
    assert np.allclose(curve.values.real, expected, atol=1e-10)


def test_sampled_ensemble_is_reproducible():
    """Same seed, same curve, bit for bit"""
    grid = GammaGrid.x_range(0, 20, 25)
    first = ensemble_correlator("cue", 6, grid, samples=500, rng=RngStream(seed=7))
    second = ensemble_correlator("cue", 6, grid, samples=500, rng=RngStream(seed=7))
    assert np.array_equal(first.values, second.values)
    assert first.stderr is not None


def test_sampled_poisson_within_error_bars():
    grid = GammaGrid.from_gamma([1.0, 0.8, np.exp(0.4j)])
    exact = ensemble_correlator("poisson", 4, grid).scaled_values()
    sampled = ensemble_correlator("poisson", 4, grid, samples=20_000, rng=RngStream(seed=3))
    z = np.abs(sampled.values - exact) / sampled.stderr
    assert np.all(z < 4.5), f"z-scores {z}"
