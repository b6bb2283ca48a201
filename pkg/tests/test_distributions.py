"""Advice distribution kinds: means, CDF conventions, sampling, constructions."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from contract_sched.distributions import (
    AdversarialContinuous,
    PerturbedContinuous,
    PointSet,
    TruncatedNormal,
    Uniform,
    adversarial_continuous,
    adversarial_discrete,
    shifted,
)


def mean_by_quadrature(density, lo, hi):
    val, err = quad(density, lo, hi, limit=400)
    assert abs(val) < math.inf
    return val


# -- means -------------------------------------------------------------------

def test_mean_examples():
    assert adversarial_continuous(1.0).mean() == pytest.approx(2.0 * math.log(2.0), rel=1e-15)
    assert Uniform(0.95, 1.05).mean() == pytest.approx(1.0, rel=1e-15)
    assert PointSet([(4.0, 1.0)]).mean() == 4.0


def test_adversarial_continuous_mean_matches_quadrature():
    for D in (1e-3, 1.0, 7.5, 1e6):
        mu = adversarial_continuous(D)
        oracle = mean_by_quadrature(lambda x: x * 2.0 * D / x**2, D, 2.0 * D)
        assert mu.mean() == pytest.approx(oracle, rel=1e-10)


def test_truncated_normal_mean_matches_quadrature():
    for m, sigma in ((500.0, 25.0), (1.0, 10.0), (3.0, 0.05 * 3.0), (-2.0, 4.0)):
        mu = TruncatedNormal(m, sigma)
        norm = lambda x: math.exp(-0.5 * ((x - m) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
        keep, _ = quad(norm, 0.0, m + 12.0 * sigma)
        oracle = mean_by_quadrature(lambda x: x * norm(x), 0.0, m + 12.0 * sigma) / keep
        assert mu.mean() == pytest.approx(oracle, rel=1e-9)


# -- interval masses and CDF conventions --------------------------------------

def test_interval_mass_examples():
    assert Uniform(1.0, 2.0).interval_mass(1.0, 1.5) == pytest.approx(0.5, rel=1e-15)
    point = PointSet([(2.0, 1.0)])
    assert point.interval_mass(2.0, 3.0) == 1.0  # left endpoint included
    assert point.interval_mass(1.0, 2.0) == 0.0  # right endpoint excluded
    mu = adversarial_continuous(1.0)
    assert mu.interval_mass(1.0, math.sqrt(2.0)) == pytest.approx(2.0 - math.sqrt(2.0), rel=1e-12)


def test_interval_mass_rejects_bad_bounds():
    mu = Uniform(1.0, 2.0)
    with pytest.raises(ValueError):
        mu.interval_mass(0.0, 1.0)
    with pytest.raises(ValueError):
        mu.interval_mass(2.0, 1.0)


def test_interval_mass_additive_and_total():
    rng = np.random.default_rng(5)
    dists = [
        Uniform(2.0, 9.0),
        adversarial_continuous(3.0),
        TruncatedNormal(50.0, 7.0),
        PointSet([(1.0, 0.25), (2.5, 0.5), (7.0, 0.25)]),
    ]
    for mu in dists:
        lo, hi = mu.effective_support()
        cuts = np.sort(rng.uniform(lo, hi, 17))
        edges = np.concatenate(([lo * 0.5], cuts, [hi * 2.0]))
        total = sum(mu.interval_mass(a, b) for a, b in zip(edges, edges[1:]))
        assert total == pytest.approx(1.0, abs=1e-9)


def test_adversarial_continuous_cdf_endpoints():
    mu = adversarial_continuous(1.0)
    assert mu.cdf(1.0) == 0.0
    assert mu.cdf(2.0) == 1.0
    assert mu.cdf(0.5) == 0.0
    assert mu.cdf(3.0) == 1.0


def test_validation_errors():
    with pytest.raises(ValueError):
        Uniform(0.0, 1.0)
    with pytest.raises(ValueError):
        Uniform(2.0, 1.0)
    with pytest.raises(ValueError):
        TruncatedNormal(1.0, 0.0)
    with pytest.raises(ValueError):
        AdversarialContinuous(0.0)
    with pytest.raises(ValueError):
        PointSet([])
    with pytest.raises(ValueError):
        PointSet([(1.0, 0.5)])  # mass does not total 1
    with pytest.raises(ValueError):
        PointSet([(-1.0, 1.0)])  # support must be positive


# -- quantiles and sampling ----------------------------------------------------

def test_quantile_inverts_cdf():
    dists = [
        Uniform(2.0, 9.0),
        adversarial_continuous(5.0),
        TruncatedNormal(100.0, 30.0),
    ]
    us = np.linspace(1e-6, 1.0 - 1e-6, 101)
    for mu in dists:
        xs = mu.quantile(us)
        back = np.asarray(mu.cdf(xs), dtype=float)
        assert np.allclose(back, us, atol=1e-9)


def test_point_set_quantile_steps():
    mu = PointSet([(1.0, 0.25), (2.0, 0.25), (4.0, 0.5)])
    assert mu.quantile(0.0) == 1.0
    assert mu.quantile(0.2) == 1.0
    assert mu.quantile(0.25) == 1.0
    assert mu.quantile(0.2500001) == 2.0
    assert mu.quantile(0.999) == 4.0


def test_sampling_reproducible_and_in_support():
    mu = TruncatedNormal(10.0, 20.0)
    a = mu.sample(np.random.default_rng(42), 1000)
    b = mu.sample(np.random.default_rng(42), 1000)
    assert np.array_equal(a, b)
    assert np.all(a > 0.0)


# -- adversarial discrete construction ----------------------------------------

def test_adversarial_discrete_single_point():
    mu = adversarial_discrete([0.0], eps=1e-9)
    (t, m), = mu.points
    assert m == 1.0
    assert t == pytest.approx(4.0, rel=1e-8)


def test_adversarial_discrete_masses_telescope():
    mu = adversarial_discrete([0.0, 0.5], eps=1e-9)
    masses = sorted(m for _, m in mu.points)
    assert masses[0] == pytest.approx(math.sqrt(2.0) - 1.0, rel=1e-12)
    assert masses[1] == pytest.approx(2.0 - math.sqrt(2.0), rel=1e-12)
    assert sum(m for _, m in mu.points) == pytest.approx(1.0, abs=1e-15)

    rng = np.random.default_rng(11)
    for _ in range(25):
        lams = np.sort(rng.uniform(0.0, 1.0, rng.integers(1, 9)))
        lams = np.unique(lams)
        mu = adversarial_discrete(lams.tolist(), eps=1e-6)
        assert sum(m for _, m in mu.points) == pytest.approx(1.0, abs=1e-12)


def test_adversarial_discrete_validation():
    with pytest.raises(ValueError):
        adversarial_discrete([0.5, 0.25])
    with pytest.raises(ValueError):
        adversarial_discrete([0.1, 0.1])
    with pytest.raises(ValueError):
        adversarial_discrete([0.0, 1.0])
    with pytest.raises(ValueError):
        adversarial_discrete([0.0], eps=0.5)


# -- shifted and perturbed carriers --------------------------------------------

def test_shifted_distribution_basics():
    base = Uniform(1.0, 2.0)
    mu = shifted(base, 3.0)
    assert mu.mean() == pytest.approx(base.mean() + 3.0, rel=1e-15)
    assert mu.support() == (4.0, 5.0)
    assert mu.cdf(4.5) == pytest.approx(0.5, rel=1e-12)
    with pytest.raises(ValueError):
        shifted(base, -1.5)  # support would leave (0, inf)


def test_perturbed_continuous_conserves_mass_and_mean():
    base = AdversarialContinuous(2.0)
    band = (2.5, 3.0)
    mass = float(base.mass_below(band[1]) - base.mass_below(band[0]))
    mu = PerturbedContinuous(2.0, removed=(band,), atoms=((2.4, mass),))
    assert mu.cdf(4.0) == pytest.approx(1.0, abs=1e-12)
    # mean drops by the transported mass times the distance it moved
    oracle = base.mean() - mean_by_quadrature(
        lambda x: (x - 2.4) * 2.0 * 2.0 / x**2, band[0], band[1]
    )
    assert mu.mean() == pytest.approx(oracle, rel=1e-10)


def test_perturbed_continuous_rejects_unbalanced_atoms():
    with pytest.raises(ValueError):
        PerturbedContinuous(1.0, removed=((1.2, 1.4),), atoms=((1.1, 0.5),))
