"""
Tests for the Poisson → CUE crossover: Poisson traces, the exponent f_ε, its
interior maximum, the exact damped sum and its large-N forms
"""
from math import comb

import numpy as np
import pytest
from pydantic import ValidationError

from omegalab.core.errors import DomainError, RegimeError
from omegalab.engine.crossover import (
    asymptotic_correlator, classify_regime, crossover_exact, curve_zeros, f_entropy, f_eps, f_eps_prime,
    f_eps_second, log_poisson_traces, poisson_trace_stirling, poisson_traces, poisson_traces_exact, solve_y_eps,
)
from omegalab.schemas.crossover import CrossoverPoint
from omegalab.schemas.curve import GammaGrid


def test_poisson_traces_small_n():
    assert poisson_traces_exact(4) == [1, 3, 2]
    assert poisson_traces_exact(6) == [1, 5, 9, 5]


@pytest.mark.parametrize("n", range(1, 31))
def test_poisson_traces_recover_two_to_the_n(n):
    """Σ_p (N−2p+1)(C(N,p) − C(N,p−1)) = 2^N"""
    total = sum(t * (n - 2 * p + 1) for p, t in enumerate(poisson_traces_exact(n)))
    assert total == 2 ** n


def test_log_traces_match_exact():
    n = 200
    exact = np.array([float(comb(n, p) - (comb(n, p - 1) if p else 0)) for p in range(n // 2 + 1)])
    assert np.allclose(log_poisson_traces(n), np.log(exact), rtol=1e-10, atol=1e-10)


def test_poisson_traces_large_n_are_finite():
    traces = poisson_traces(1000)
    assert np.all(np.isfinite(traces))
    assert traces[0] == pytest.approx(1.0)


def test_stirling_form():
    n, p = 200, 60
    exact = comb(n, p) - comb(n, p - 1)
    assert poisson_trace_stirling(n, p) == pytest.approx(exact, rel=0.02)
    with pytest.raises(DomainError):
        poisson_trace_stirling(10, 5)


def test_entropy_function():
    assert f_entropy(0.5) == pytest.approx(np.log(2))
    assert f_entropy(0.0) == 0.0
    assert f_entropy(0.2) == pytest.approx(f_entropy(0.8))
    assert f_eps(0.5, 1.0) == pytest.approx(np.log(2) - 0.5)
    with pytest.raises(DomainError):
        f_entropy(1.5)


def test_y_eps_at_two():
    y = solve_y_eps(2.0)
    assert y == pytest.approx(0.021248, abs=1e-5)
    assert f_eps_prime(y, 2.0) == pytest.approx(0.0, abs=1e-9)
    assert f_eps_second(y, 2.0) < 0


def test_y_eps_large_eps_is_exponentially_small():
    """y_ε ≈ e^{−2ε} para ε grande"""
    assert 0.95 <= solve_y_eps(8.0) / np.exp(-16.0) <= 1.05


def test_y_eps_near_critical_point():
    """Justo encima de ε = 1 el máximo sale de y = 1/2"""
    assert abs(solve_y_eps(1 + 1e-6) - 0.5) < 1e-2


def test_y_eps_requires_supercritical():
    with pytest.raises(RegimeError):
        solve_y_eps(1.0)
    with pytest.raises(RegimeError):
        solve_y_eps(0.4)


def test_classify_regime():
    assert classify_regime(10, 0.5).regime == "subcritical"
    assert classify_regime(10, 1.0).regime == "critical"
    point = classify_regime(10, 2.0)
    assert point.regime == "supercritical"
    assert point.y_eps == pytest.approx(0.021248, abs=1e-5)


def test_crossover_point_validation():
    with pytest.raises(ValidationError):
        CrossoverPoint(n=10, eps=2.0, regime="subcritical")
    with pytest.raises(ValidationError):
        CrossoverPoint(n=10, eps=2.0, regime="supercritical")


def test_exact_at_zero_eps_is_poisson():
    """ε = 0, x = 0: ⟨Ω⟩ = 2^N"""
    curve = crossover_exact(12, 0.0, GammaGrid.from_x([0.0]))
    assert curve.scaled_values()[0].real == pytest.approx(2 ** 12, rel=1e-12)


def test_exact_large_eps_keeps_only_first_tower():
    """ε = 12, N = 100: solo sobrevive el término p = 0"""
    n = 100
    curve = crossover_exact(n, 12.0, GammaGrid.from_x([0.0]))
    assert curve.scaled_values()[0].real == pytest.approx(n + 1, rel=1e-6)


def test_exact_moderate_eps_close_to_first_tower():
    n = 100
    curve = crossover_exact(n, 5.0, GammaGrid.from_x([0.0]))
    assert curve.scaled_values()[0].real == pytest.approx(n + 1, rel=1e-2)


def test_exact_decreases_with_eps():
    origin = GammaGrid.from_x([0.0])
    values = [crossover_exact(20, eps, origin).scaled_values()[0].real for eps in np.linspace(0, 5, 11)]
    assert np.all(np.diff(values) < 0)


def test_exact_rejects_bad_parameters():
    grid = GammaGrid.from_x([1.0])
    with pytest.raises(DomainError):
        crossover_exact(10, -0.1, grid)
    with pytest.raises(DomainError):
        crossover_exact(10_001, 1.0, grid)


def test_exact_large_n_stays_finite():
    curve = crossover_exact(5000, 0.3, GammaGrid.x_range(0, 10, 11))
    assert np.all(np.isfinite(curve.values))
    assert curve.log_scale > 700


def test_subcritical_asymptotic_ratio():
    grid = GammaGrid.from_x([1.0])
    exact = crossover_exact(60, 0.5, grid)
    approx = asymptotic_correlator(60, 0.5, grid)
    ratio = (exact.values[0] / approx.values[0]).real * np.exp(exact.log_scale - approx.log_scale)
    assert ratio == pytest.approx(1.0, abs=0.1)


def test_asymptotic_at_zero_eps_is_two_to_the_n():
    curve = asymptotic_correlator(30, 0.0, GammaGrid.from_x([0.0, 5.0]))
    assert np.allclose(curve.scaled_values().real, 2 ** 30)


def test_asymptotic_critical_raises():
    with pytest.raises(RegimeError):
        asymptotic_correlator(50, 1.0, GammaGrid.from_x([1.0]))


def test_supercritical_zero_spacing():
    """Los ceros de ⟨Ω⟩ quedan separados 2π/(1 − 2y_ε)"""
    grid = GammaGrid.x_range(0.0, 40.0, 4001)
    zeros = curve_zeros(crossover_exact(2000, 2.0, grid))
    expected = 2 * np.pi / (1 - 2 * solve_y_eps(2.0))
    assert len(zeros) >= 5
    assert np.mean(np.diff(zeros)) == pytest.approx(expected, rel=0.02)


def test_supercritical_asymptotic_zeros_agree():
    grid = GammaGrid.x_range(0.0, 30.0, 3001)
    exact = curve_zeros(crossover_exact(1000, 2.0, grid))
    approx = curve_zeros(asymptotic_correlator(1000, 2.0, grid))
    assert exact[0] == pytest.approx(approx[0], rel=0.02)
    assert approx[0] == pytest.approx(np.pi / (0.5 - solve_y_eps(2.0)), rel=1e-3)


def test_curve_zeros_needs_x_grid():
    curve = crossover_exact(10, 2.0, GammaGrid.from_gamma([1.0, 0.9]))
    with pytest.raises(ValueError):
        curve_zeros(curve)
