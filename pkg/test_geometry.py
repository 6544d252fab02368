"""
Tests for the coherent-state manifold: constants, census of critical
submanifolds, invariant sampling and Monte Carlo integrals
"""
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from omegalab.core.errors import DomainError, OracleScaleError
from omegalab.engine.correlator import omega_secular
from omegalab.engine.geometry import (
    _integrand, effective_action, expected_manifold_count, gamma_string, hua_integral_exact, hua_integral_mc,
    manifold_census, mc_omega, normalization_constant, normalization_constant_exact, sample_invariant,
    sample_invariant_batch, total_mass_exact, vacuum_overlap_mc, vol_submanifold,
)
from omegalab.engine.unitary import haar_sample, make_unitary
from omegalab.schemas.curve import GammaGrid
from omegalab.schemas.geometry import GrassmannPoint, McEstimate
from omegalab.schemas.matrix import RngStream


@pytest.fixture
def rng():
    return RngStream(seed=2718)


def test_gamma_string():
    assert gamma_string(0) == 1
    assert gamma_string(3) == 2
    assert gamma_string(5) == 288
    with pytest.raises(DomainError):
        gamma_string(-1)


def test_hua_integrals():
    assert hua_integral_exact(1, 1) == 1
    assert hua_integral_exact(1, 2) == Fraction(1, 2)
    assert hua_integral_exact(2, 2) == Fraction(1, 12)


def test_normalization_constants():
    assert normalization_constant_exact(1) == 2
    assert normalization_constant_exact(2) == 72
    assert normalization_constant(2) == 72.0


@pytest.mark.parametrize("n", range(1, 13))
def test_total_mass_is_central_binomial(n):
    """C_N·I(N,N) = C(2N,N)"""
    assert total_mass_exact(n) == comb(2 * n, n)


def test_submanifold_volumes():
    assert vol_submanifold(2, 0, 0) == 1.0
    assert vol_submanifold(2, 1, 0) == 1.0
    assert vol_submanifold(4, 2, 0) == pytest.approx(1 / 12)
    with pytest.raises(DomainError):
        vol_submanifold(3, 2, 2)


def test_submanifold_volume_decays_with_n():
    volumes = [vol_submanifold(n, n // 2, 0) for n in (4, 6, 8, 10)]
    ratios = np.array(volumes[1:]) / np.array(volumes[:-1])
    assert np.all(ratios < 1)
    assert np.all(np.diff(ratios) < 0)


@pytest.mark.parametrize("n", range(1, 11))
def test_census(n):
    """El censo cuenta (N/2+1)² o (N+1)(N+3)/4 subvariedades con C(2N,N) puntos"""
    census = manifold_census(n)
    assert census.count == expected_manifold_count(n)
    assert census.total_points == comb(2 * n, n)


def test_census_small_case():
    census = manifold_census(2)
    assert {(c.p, c.r): c.points for c in census.classes} == {(0, 0): 1, (1, 0): 2, (1, 1): 2, (2, 0): 1}


def test_sample_invariant_point(rng):
    point = sample_invariant(2, rng)
    assert point.n == 2
    assert point.source.shape == (4, 4)
    g = point.source
    assert np.allclose(point.z, g[:2, 2:] @ np.linalg.inv(g[2:, 2:]))


def test_grassmann_point_validation():
    with pytest.raises(ValidationError):
        GrassmannPoint(z=np.zeros((2, 3)))


def test_single_mode_sampling_is_uniform(rng):
    """N = 1: |Z|²/(1 + |Z|²) es uniforme en [0, 1]"""
    zs = sample_invariant_batch(1, 100_000, rng.generator())
    modulus = np.abs(zs[:, 0, 0]) ** 2
    result = stats.kstest(modulus / (1 + modulus), "uniform")
    assert result.pvalue > 0.01


def test_vacuum_overlap(rng):
    """E[Det(1 + Z†Z)^{−1}] = 1/C(2N,N)"""
    estimate = vacuum_overlap_mc(2, 20_000, rng)
    assert estimate.z_score(1 / 6) < 4.5


def test_mc_omega_single_mode(rng):
    U = make_unitary(np.eye(1))
    gamma = 0.9
    estimate = mc_omega(U, gamma, 100_000, rng)
    exact = gamma ** -0.5 * (1 + gamma)
    assert estimate.z_score(exact) < 3


def test_mc_omega_two_modes(rng):
    U = haar_sample(2, rng.substream(1))
    estimate = mc_omega(U, 1.0, 100_000, rng.substream(2))
    exact = omega_secular(U, GammaGrid.from_gamma([1.0])).values[0]
    assert estimate.z_score(exact) < 3


@pytest.mark.parametrize("gamma", [1.2 * np.exp(0.7j), 0.7 * np.exp(-2.1j)])
def test_mc_omega_two_modes_off_the_circle(gamma, rng):
    U = haar_sample(2, rng.substream(5))
    estimate = mc_omega(U, gamma, 100_000, rng.substream(6))
    exact = omega_secular(U, GammaGrid.from_gamma([gamma])).values[0]
    assert estimate.z_score(exact) < 4


def test_mc_omega_is_capped(rng):
    with pytest.raises(OracleScaleError):
        mc_omega(make_unitary(np.eye(4)), 0.9, 10, rng)


def test_mc_omega_is_reproducible(rng):
    U = make_unitary(np.eye(1))
    first = mc_omega(U, 0.7, 5000, rng)
    second = mc_omega(U, 0.7, 5000, RngStream(seed=2718))
    assert first.estimate == second.estimate


def test_effective_action_matches_integrand(rng):
    """e^{−S} es el integrando γ^{−N/2} Det(1 + γZ†UZU†)/Det(1 + Z†Z)"""
    U = haar_sample(2, rng)
    z = sample_invariant(2, rng.substream(3)).z
    gamma = 0.8 + 0.3j
    action = effective_action(U, gamma, z)
    assert np.exp(-action) == pytest.approx(_integrand(z[None], U.entries, gamma)[0], rel=1e-10)


def test_effective_action_at_origin(rng):
    U = haar_sample(2, rng)
    assert effective_action(U, 0.7, np.zeros((2, 2))) == pytest.approx(np.log(0.7))
    assert effective_action(make_unitary(np.eye(2)), 1.0, np.zeros((2, 2))) == pytest.approx(0.0)


@pytest.mark.parametrize("m,n,exact", [(1, 1, 1.0), (1, 2, 0.5), (2, 2, 1 / 12)])
def test_hua_integral_monte_carlo(m, n, exact, rng):
    estimate = hua_integral_mc(m, n, 40_000, rng)
    assert estimate.z_score(exact) < 3


def test_mc_estimate_z_score():
    assert McEstimate(estimate=1.0, stderr=0.0, samples=5).z_score(1.0) == 0.0
    assert McEstimate(estimate=1.0, stderr=0.0, samples=5).z_score(2.0) == float("inf")
    assert McEstimate(estimate=1.5, stderr=0.25, samples=5).z_score(1.0) == pytest.approx(2.0)
