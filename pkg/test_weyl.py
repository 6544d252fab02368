"""
Tests for the Weyl saddle sum: configurations, single terms, compensated
summation, the exact fallback and the saddle certificate
"""
import numpy as np
import pytest
from pydantic import ValidationError

from omegalab.core.errors import OracleScaleError, WeylPoleError
from omegalab.engine.correlator import omega_secular
from omegalab.engine.geometry import manifold_points
from omegalab.engine.summation import CompensatedSum, two_sum
from omegalab.engine.unitary import eigenphases, haar_batch, haar_sample, make_unitary
from omegalab.engine.weyl import (
    config_class_counts, enumerate_configs, exact_weyl_total, is_saddle_point, pair_partner, phi_spectrum,
    saddle_certificate, weyl_max_terms, weyl_sum, weyl_term, weyl_term_aggregates,
)
from omegalab.schemas.curve import GammaGrid
from omegalab.schemas.matrix import RngStream, UnitaryMatrix
from omegalab.schemas.saddle import SubsetConfig


def diagonal(phases) -> UnitaryMatrix:
    return make_unitary(np.diag(np.exp(1j * np.asarray(phases))))


@pytest.fixture
def grid():
    """x real en la rejilla, lejos de γ = 1"""
    return GammaGrid.from_x([0.7, 2.0, 5.5, -3.1, 11.0])


def test_two_sum_is_error_free():
    s, t = two_sum(1e16, 1.0)
    assert s == 1e16
    assert t == 1.0


def test_compensated_sum_recovers_cancelled_units():
    acc = CompensatedSum()
    for value in [1e16, 1.0, -1e16, 1.0j, 1e17j, -1e17j]:
        acc.add(value)
    assert acc.value == 1.0 + 1.0j


def test_compensated_sum_merge_and_add_many():
    """Merging partial sums gives the same total as one long sum"""
    values = [3e15, 0.5, -3e15, 0.25, 7.0]
    whole = CompensatedSum()
    whole.add_many(values)
    left, right = CompensatedSum(), CompensatedSum()
    left.add_many(values[:2])
    right.add_many(values[2:])
    left.merge(right)
    assert whole.value == 7.75
    assert left.value == 7.75


@pytest.mark.parametrize("n", [1, 2, 3])
def test_enumeration_covers_every_subset(n):
    configs = list(enumerate_configs(n))
    assert len(configs) == {1: 2, 2: 6, 3: 20}[n]
    assert len({cfg.subset for cfg in configs}) == len(configs)


def test_enumeration_is_capped():
    with pytest.raises(OracleScaleError):
        next(enumerate_configs(15))


def test_subset_config_validation():
    with pytest.raises(ValidationError):
        SubsetConfig(n=2, subset=(1, 1))
    with pytest.raises(ValidationError):
        SubsetConfig(n=2, subset=(3, 1))
    with pytest.raises(ValidationError):
        SubsetConfig(n=2, subset=(1, 5))


def test_subset_labels():
    """S = {1, 4, 5} con N = 3: S1 = {1}, S2 = {1, 2}, p = 2, r = 1"""
    cfg = SubsetConfig(n=3, subset=(1, 4, 5))
    assert cfg.s1 == {1}
    assert cfg.s2 == {1, 2}
    assert (cfg.p, cfg.r) == (2, 1)
    assert cfg.complement() == (2, 3, 6)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_class_counts_match_census(n):
    """Cada clase (p, r) tiene C(N,p)C(p,r)C(N−p,r) configuraciones"""
    counts = config_class_counts(n)
    for (p, r), count in counts.items():
        assert count == manifold_points(n, p, r)


def test_pair_partner_swaps_p():
    for cfg in enumerate_configs(3):
        partner = pair_partner(cfg)
        assert (partner.p, partner.r) == (3 - cfg.p, cfg.r)
        assert pair_partner(partner) == cfg


def test_single_matrix_n1_terms():
    """N = 1: the two terms are 1/(1−γ) and γ²/(γ−1)"""
    x = 0.8
    gamma = np.exp(1j * x)
    phis = phi_spectrum(np.array([0.4]), 1j * x)
    first = weyl_term(SubsetConfig(n=1, subset=(1,)), phis)
    second = weyl_term(SubsetConfig(n=1, subset=(2,)), phis)
    assert first == pytest.approx(1 / (1 - gamma))
    assert second == pytest.approx(gamma ** 2 / (gamma - 1))


def test_partner_terms_are_conjugate():
    """Sobre |γ| = 1, γ^{−N/2} term(S̄) = conj(γ^{−N/2} term(S))"""
    x, n = 0.9, 3
    phis = phi_spectrum(np.array([0.3, 1.7, 4.2]), 1j * x / n)
    prefactor = np.exp(-0.5j * x)
    for cfg in enumerate_configs(n):
        term = prefactor * weyl_term(cfg, phis)
        partner = prefactor * weyl_term(pair_partner(cfg), phis)
        assert partner == pytest.approx(np.conj(term), rel=1e-10, abs=1e-12)


def test_weyl_term_rejects_mismatched_n():
    phis = phi_spectrum(np.array([0.1, 0.2]), 0.3j)
    with pytest.raises(ValueError):
        weyl_term(SubsetConfig(n=1, subset=(1,)), phis)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_weyl_sum_reproduces_secular(n, grid):
    """La suma sobre las C(2N,N) sillas es exacta"""
    U = haar_sample(n, RngStream(seed=300 + n))
    weyl = weyl_sum(U, grid).values
    secular = omega_secular(U, grid).values
    scale = max(1.0, float(np.max(np.abs(secular))))
    assert np.max(np.abs(weyl - secular)) / scale < 1e-7


def test_weyl_sum_off_unit_circle():
    U = haar_sample(3, RngStream(seed=9))
    grid = GammaGrid.from_gamma([0.6, 1.8 + 0.4j])
    assert np.allclose(weyl_sum(U, grid).values, omega_secular(U, grid).values, rtol=1e-8)


def test_weyl_sum_near_gamma_one():
    """En x = 1e−4 los términos crecen como x^{−N}; la suma sigue siendo exacta"""
    U = diagonal([0.2, 1.4, 3.0])
    grid = GammaGrid.from_x([1e-4])
    weyl = weyl_sum(U, grid).values[0]
    secular = omega_secular(U, grid).values[0]
    assert abs(weyl - secular) / abs(secular) < 1e-4


def test_exact_and_double_precision_agree():
    U = haar_sample(3, RngStream(seed=21))
    grid = GammaGrid.from_x([1.3, 4.0])
    double = weyl_sum(U, grid, exact="never").values
    exact = weyl_sum(U, grid, exact="always").values
    assert np.allclose(double, exact, rtol=1e-9)


def test_exact_total_for_single_mode():
    """N = 1: Σ_S term(S) = 1 + γ"""
    gamma = np.exp(0.5j)
    z = np.exp(1j * np.array([0.5 + 1.1, 1.1]))
    assert exact_weyl_total(z) == pytest.approx(1 + gamma, rel=1e-14)


def test_largest_term_grows_towards_gamma_one():
    U = diagonal([0.3, 2.1, 4.0])
    largest = weyl_max_terms(U, GammaGrid.from_x([1e-3, 1e-1]))
    assert largest[0] > 1e3 * largest[1]


def test_degenerate_spectrum_raises():
    """Fases repetidas hacen singular el término de Weyl"""
    with pytest.raises(WeylPoleError):
        weyl_sum(make_unitary(np.eye(2)), GammaGrid.from_x([1.0]))


def test_weyl_sum_is_capped():
    with pytest.raises(OracleScaleError):
        weyl_sum(make_unitary(np.eye(15)), GammaGrid.from_x([1.0]))


def test_worker_count_does_not_change_the_sum(grid):
    U = haar_sample(4, RngStream(seed=17))
    assert np.array_equal(weyl_sum(U, grid, workers=1).values, weyl_sum(U, grid, workers=2).values)


def test_term_aggregates_add_up_to_omega():
    U = haar_sample(3, RngStream(seed=23))
    x = 2.5
    groups = weyl_term_aggregates(U, x)
    total = sum(group["sum"] for group in groups)
    assert total == pytest.approx(omega_secular(U, GammaGrid.from_x([x])).values[0], rel=1e-9)
    assert {(g["p"], g["r"]): g["count"] for g in groups} == config_class_counts(3)


def test_saddle_certificate_for_every_configuration():
    """Cada S da un punto de silla: bloques b, c nulos y Det d ≠ 0"""
    U = haar_sample(2, RngStream(seed=31))
    gamma = np.exp(0.4j)
    for cfg in enumerate_configs(2):
        certificate = saddle_certificate(U, cfg, gamma)
        assert certificate["offdiag"] < 1e-10
        assert certificate["det_d"] > 1e-6


def test_random_point_is_not_a_saddle():
    U = haar_sample(2, RngStream(seed=31))
    g = haar_batch(4, 1, RngStream(seed=32).generator())[0]
    assert not is_saddle_point(g, U, np.exp(0.4j))


def test_phi_spectrum_layout():
    spectrum = eigenphases(diagonal([0.5, 1.0]))
    phis = phi_spectrum(spectrum, 0.2j)
    assert np.allclose(phis.phis, [0.7, 1.2, 0.5, 1.0])
