"""Expected profit, consistency, and portfolio selection under advice."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from contract_sched.distributions import (
    PointSet,
    TruncatedNormal,
    Uniform,
    adversarial_continuous,
    adversarial_discrete,
)
from contract_sched.schedule import GeometricSchedule
from contract_sched.selection import (
    PortfolioSizeError,
    best_for_accuracy,
    best_in_portfolio,
    consistency,
    expected_profit,
    expected_profit_detail,
    monte_carlo_consistency,
    performance_under,
    portfolio_bound,
)

FOUR_LN2 = 4.0 * math.log(2.0)


def expected_profit_by_quadrature(mu, schedule, lo, hi, density):
    """Independent oracle: integrate profit * density over the support."""
    breaks = [lo] + [
        schedule.completion_time(i)
        for i in range(schedule.completion_index(lo) + 1, schedule.completion_index(hi) + 1)
    ] + [hi]
    total = 0.0
    for a, b in zip(breaks, breaks[1:]):
        if b <= a:
            continue
        total += quad(lambda x: schedule.profit(x) * density(x), a, b, limit=200)[0]
    return total


# -- expected profit -----------------------------------------------------------

def test_expected_profit_examples():
    # adversarial continuous advice earns exactly D/2 for every phase
    for D, phase in ((1.0, 0.0), (5.0, 0.3), (7.0, 0.6), (1e-3, 0.99), (1e6, 0.123)):
        mu = adversarial_continuous(D)
        assert expected_profit(mu, GeometricSchedule(phase)) == pytest.approx(D / 2.0, rel=1e-12)
    assert expected_profit(PointSet([(4.0, 1.0)]), GeometricSchedule(0.0)) == 2.0
    assert expected_profit(Uniform(2.0, 4.0), GeometricSchedule(0.0)) == pytest.approx(1.0, rel=1e-12)


def test_expected_profit_matches_quadrature_oracle():
    cases = [
        (Uniform(1.5, 40.0), GeometricSchedule(0.25), 1.5, 40.0,
         lambda x: 1.0 / (40.0 - 1.5)),
        (adversarial_continuous(3.0), GeometricSchedule(0.7), 3.0, 6.0,
         lambda x: 6.0 / x**2),
    ]
    for mu, schedule, lo, hi, density in cases:
        oracle = expected_profit_by_quadrature(mu, schedule, lo, hi, density)
        assert expected_profit(mu, schedule) == pytest.approx(oracle, rel=1e-9)


def test_expected_profit_truncated_normal_vs_quadrature():
    mu = TruncatedNormal(500.0, 25.0)
    schedule = GeometricSchedule(0.4)
    norm = lambda x: math.exp(-0.5 * ((x - 500.0) / 25.0) ** 2) / (25.0 * math.sqrt(2 * math.pi))
    oracle = expected_profit_by_quadrature(mu, schedule, 1e-3, 500.0 + 10 * 25.0, norm)
    assert expected_profit(mu, schedule) == pytest.approx(oracle, rel=1e-9)


def test_expected_profit_error_bound_reported():
    value, err = expected_profit_detail(TruncatedNormal(100.0, 10.0), GeometricSchedule(0.0))
    assert value > 0.0
    assert 0.0 <= err < 1e-8 * value


# -- consistency ---------------------------------------------------------------

def test_consistency_examples():
    assert consistency(adversarial_continuous(7.0), GeometricSchedule(0.6)) == pytest.approx(
        FOUR_LN2, abs=1e-12
    )
    assert consistency(PointSet([(4.0, 1.0)]), GeometricSchedule(0.0)) == 2.0
    assert consistency(PointSet([(3.999, 1.0)]), GeometricSchedule(0.0)) == pytest.approx(
        3.999, rel=1e-15
    )


def test_consistency_rejects_underflowed_profit():
    # support so deep that every completed contract length flushes to zero
    mu = PointSet([(5e-324, 1.0)])
    with pytest.raises(ValueError):
        consistency(mu, GeometricSchedule(0.0))


# -- portfolio bound and selection ----------------------------------------------

def test_portfolio_bound_values():
    assert portfolio_bound(1) == 4.0
    assert portfolio_bound(4) == pytest.approx(16.0 * (2.0**0.25 - 1.0), rel=1e-15)
    assert abs(portfolio_bound(10**6) - FOUR_LN2) < 1e-5
    values = [portfolio_bound(n) for n in range(1, 60)]
    assert all(a > b for a, b in zip(values, values[1:]))  # strictly decreasing


def test_best_in_portfolio_respects_guarantee():
    rng = np.random.default_rng(123)
    for n in (1, 2, 4, 8, 16, 64):
        for _ in range(12):
            kind = rng.integers(0, 3)
            if kind == 0:
                m = float(rng.uniform(1.0, 2000.0))
                mu = TruncatedNormal(m, float(rng.uniform(0.01, 0.3)) * m)
            elif kind == 1:
                lo = float(rng.uniform(0.1, 500.0))
                mu = Uniform(lo, lo * float(rng.uniform(1.01, 8.0)))
            else:
                k = int(rng.integers(1, 9))
                ts = rng.uniform(0.5, 3000.0, k)
                ws = rng.dirichlet(np.ones(k))
                mu = PointSet(list(zip(ts.tolist(), ws.tolist())))
            report = best_in_portfolio(mu, n)
            assert report.consistency <= report.guarantee + 1e-9
            assert report.consistency >= 2.0 - 1e-9
            assert report.guarantee == portfolio_bound(n)
            assert report.consistency == pytest.approx(
                report.expected_value / report.expected_profit, rel=1e-12
            )


def test_best_in_portfolio_tie_breaks_to_smallest_phase():
    # any single point at a power of two is served equally by phase 0 of n=1..;
    # equal-profit ties must resolve to the smallest j
    mu = PointSet([(2.0, 0.5), (4.0, 0.5)])
    report = best_in_portfolio(mu, 1)
    assert report.phase == 0.0


def test_best_in_portfolio_adversarial_discrete_is_tight():
    for n in (1, 2, 4, 8):
        mu = adversarial_discrete([j / n for j in range(n)], eps=1e-9)
        bound = portfolio_bound(n)
        for j in range(n):
            c = consistency(mu, GeometricSchedule(j / n))
            assert abs(c - bound) < 10e-9 * n + 1e-9
        report = best_in_portfolio(mu, n)
        assert abs(report.consistency - bound) < 1e-6
        assert report.consistency <= bound + 1e-9


def test_best_for_accuracy_examples():
    mu = Uniform(1.0, 2.0)
    assert best_for_accuracy(mu, 1.3).n == 1   # 4 <= 4*ln2 + 1.3
    assert best_for_accuracy(mu, 0.3).n == 4   # bound(3)=3.11905 > 3.07259 >= bound(4)=3.02731
    assert best_for_accuracy(mu, 1e9).n == 1
    with pytest.raises(ValueError):
        best_for_accuracy(mu, 0.0)


def test_best_for_accuracy_unreachable_tolerance():
    with pytest.raises(PortfolioSizeError):
        best_for_accuracy(Uniform(1.0, 2.0), 1e-9)


# -- the averaging identity ------------------------------------------------------

def grid_point_set(rng, n):
    """Random advice supported just below the 2**((m*n+k)/n) grid, where the
    portfolio averaging argument is exactly tight."""
    count = int(rng.integers(1, 9))
    exps = rng.integers(0, 10, count)
    offs = rng.integers(0, n, count)
    ts = 2.0 ** (exps + (offs + 1.0) / n - 1e-12)
    ws = rng.dirichlet(np.ones(count))
    return PointSet(list(zip(ts.tolist(), ws.tolist())))


def test_portfolio_averaging_identity_on_grid_supported_advice():
    rng = np.random.default_rng(2024)
    for n in (2, 4, 8):
        for _ in range(20):
            mu = grid_point_set(rng, n)
            avg = np.mean([expected_profit(mu, GeometricSchedule(j / n)) for j in range(n)])
            identity = mu.mean() / (4.0 * n * (2.0 ** (1.0 / n) - 1.0))
            assert avg * n == pytest.approx(identity * n, rel=1e-9)


# -- monte carlo oracle ----------------------------------------------------------

def test_monte_carlo_agrees_with_analytic():
    cases = [
        (adversarial_continuous(1.0), GeometricSchedule(0.0)),
        (Uniform(2.0, 4.0), GeometricSchedule(0.0)),
        (TruncatedNormal(100.0, 20.0), GeometricSchedule(0.5)),
    ]
    for mu, schedule in cases:
        est, se = monte_carlo_consistency(mu, schedule, 200_000, seed=9)
        assert abs(est - consistency(mu, schedule)) <= 4.0 * se + 1e-12


def test_monte_carlo_degenerate_point_is_exact():
    for seed in (0, 1, 77):
        est, se = monte_carlo_consistency(
            PointSet([(4.0, 1.0)]), GeometricSchedule(0.0), 1000, seed=seed
        )
        assert est == 2.0
        assert se == 0.0


def test_monte_carlo_partitioned_equals_serial_combination():
    mu = Uniform(1.0, 8.0)
    schedule = GeometricSchedule(0.25)
    serial = monte_carlo_consistency(mu, schedule, 10_000, seed=3, partitions=4)
    again = monte_carlo_consistency(mu, schedule, 10_000, seed=3, partitions=4)
    assert serial == again


def test_monte_carlo_validates_inputs():
    with pytest.raises(ValueError):
        monte_carlo_consistency(Uniform(1.0, 2.0), GeometricSchedule(0.0), 10, seed=0)


# -- performance under a different reality ----------------------------------------

def test_performance_under_matches_consistency_when_advice_correct():
    mu = TruncatedNormal(300.0, 30.0)
    report = best_in_portfolio(mu, 8)
    assert performance_under(report.schedule, mu) == pytest.approx(
        report.consistency, rel=1e-15
    )


def test_performance_under_examples():
    assert performance_under(GeometricSchedule(0.0), adversarial_continuous(1.0)) == pytest.approx(
        FOUR_LN2, abs=1e-12
    )
    from contract_sched.schedule import single_advice_schedule

    schedule = single_advice_schedule(8.0)
    value = performance_under(schedule, PointSet([(7.999, 1.0)]))
    assert value == pytest.approx(3.9995, rel=1e-12)
