"""Expected profit, distributional consistency, and portfolio selection.

The expected profit of a schedule under advice is computed analytically: the
profit is a step function jumping only at completion times, so the expectation
is an exact sum of contract lengths times CDF differences at the completion
breakpoints.  No quadrature is involved; a seeded Monte-Carlo estimator is
provided as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import AdviceDistribution, PointSet
from .schedule import GeometricSchedule, profits

SELECTION_CAP = 10**7  # largest portfolio best_for_accuracy will search


class PortfolioSizeError(RuntimeError):
    """Raised when no admissible portfolio size exists below the cap."""


def portfolio_bound(n: int) -> float:
    """Consistency guarantee of the best schedule among n evenly spaced
    phases: 4n(2**(1/n) - 1).  Decreasing in n with limit 4*ln(2)."""
    if n < 1:
        raise ValueError(f"portfolio size must be >= 1, got {n}")
    return 4.0 * n * math.expm1(math.log(2.0) / n)


def expected_profit_detail(mu: AdviceDistribution, schedule: GeometricSchedule) -> tuple[float, float]:
    """Expected profit plus an upper bound on the tail-truncation error.

    Sums contract_length(i) * P(z in [completion(i), completion(i+1))) over
    every completion interval meeting the distribution's effective support.
    For unbounded supports the window trims 1e-12 mass per side; the reported
    error bound is the trimmed mass times the largest in-window profit.

    Point sets are summed atom by atom instead, which is the same sum but
    keeps atoms sitting exactly on a completion time on the inclusive side
    regardless of rounding in the breakpoint exponentials.
    """
    if isinstance(mu, PointSet):
        times = np.array([t for t, _ in mu.points])
        masses = np.array([m for _, m in mu.points])
        return float(np.dot(masses, profits(schedule, times))), 0.0
    lo, hi = mu.effective_support()
    i_lo = schedule.completion_index(lo)
    i_hi = schedule.completion_index(hi)
    idx = np.arange(i_lo, i_hi + 2, dtype=float)
    breaks = np.exp2(idx + 1.0 - schedule.phase)
    masses = np.diff(np.asarray(mu.mass_below(breaks), dtype=float))
    lengths = np.exp2(idx[:-1] - schedule.phase)
    value = float(np.dot(lengths, np.maximum(masses, 0.0)))
    mass_outside = max(0.0, 1.0 - float(masses.sum()))
    return value, mass_outside * float(lengths[-1])


def expected_profit(mu: AdviceDistribution, schedule: GeometricSchedule) -> float:
    """E[profit(schedule, z)] for z drawn from mu (exact breakpoint sum)."""
    return expected_profit_detail(mu, schedule)[0]


def consistency(mu: AdviceDistribution, schedule: GeometricSchedule) -> float:
    """E[z] / E[profit(schedule, z)] under the advice distribution mu."""
    denom = expected_profit(mu, schedule)
    if denom <= 0.0 or not math.isfinite(denom):
        raise ValueError("expected profit underflowed to zero for this support")
    return mu.mean() / denom


def performance_under(schedule: GeometricSchedule, mu_actual: AdviceDistribution) -> float:
    """Realized ratio E[z]/E[profit] when interruptions follow mu_actual.

    Same arithmetic as :func:`consistency`; use this name when the schedule
    was chosen for different advice than the distribution it now faces.
    """
    return consistency(mu_actual, schedule)


@dataclass(frozen=True)
class ConsistencyReport:
    """A selected schedule with its consistency and the bound it was checked
    against."""

    phase: float
    consistency: float
    guarantee: float
    expected_value: float
    expected_profit: float
    n: int | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def schedule(self) -> GeometricSchedule:
        return GeometricSchedule(self.phase)


def best_in_portfolio(mu: AdviceDistribution, n: int) -> ConsistencyReport:
    """Pick the best of the n schedules with phases j/n, j = 0..n-1.

    Ties break toward the smallest j for determinism.  The returned report
    satisfies consistency <= 4n(2**(1/n) - 1).
    """
    if n < 1:
        raise ValueError(f"portfolio size must be >= 1, got {n}")
    mean = mu.mean()
    best_j = -1
    best_profit = -math.inf
    best_err = 0.0
    # maximizing expected profit == minimizing consistency; strict > keeps
    # the smallest j on ties
    for j in range(n):
        value, err = expected_profit_detail(mu, GeometricSchedule(j / n))
        if value > best_profit:
            best_j, best_profit, best_err = j, value, err
    if best_profit <= 0.0:
        raise ValueError("expected profit underflowed to zero for this support")
    return ConsistencyReport(
        phase=best_j / n,
        consistency=mean / best_profit,
        guarantee=portfolio_bound(n),
        expected_value=mean,
        expected_profit=best_profit,
        n=n,
        diagnostics={"profit_error_bound": best_err},
    )


def best_for_accuracy(mu: AdviceDistribution, eps: float) -> ConsistencyReport:
    """Select from the smallest portfolio whose guarantee is within eps of
    the 4*ln(2) limit, then delegate to :func:`best_in_portfolio`."""
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    target = 4.0 * math.log(2.0) + eps
    n = 1
    while portfolio_bound(n) > target:
        n += 1
        if n > SELECTION_CAP:
            raise PortfolioSizeError(
                f"no portfolio of size <= {SELECTION_CAP} meets eps={eps}"
            )
    return best_in_portfolio(mu, n)


def monte_carlo_consistency(
    mu: AdviceDistribution,
    schedule: GeometricSchedule,
    samples: int,
    seed: int,
    partitions: int = 1,
) -> tuple[float, float]:
    """Estimate consistency by inverse-CDF sampling; independent of the
    analytic breakpoint sum.

    Uses numpy's PCG64 generator.  Samples split across `partitions` tasks
    whose generators are seeded with (seed XOR partition_index); partial sums
    combine in partition order, so a parallel run is bit-identical to a
    serial one.  Returns (estimate, delta-method standard error).
    """
    if samples < 1000:
        raise ValueError(f"need at least 1000 samples, got {samples}")
    if partitions < 1 or partitions > samples:
        raise ValueError("partitions must be in [1, samples]")
    counts = [samples // partitions] * partitions
    for k in range(samples % partitions):
        counts[k] += 1

    sums = np.zeros(5)  # z, l, z^2, l^2, z*l
    for p, count in enumerate(counts):
        rng = np.random.default_rng(seed ^ p)
        z = mu.sample(rng, count)
        ell = profits(schedule, z)
        sums += np.array(
            [z.sum(), ell.sum(), np.dot(z, z), np.dot(ell, ell), np.dot(z, ell)]
        )
    n = float(samples)
    mz, ml = sums[0] / n, sums[1] / n
    var_z = max(0.0, sums[2] / n - mz * mz)
    var_l = max(0.0, sums[3] / n - ml * ml)
    cov = sums[4] / n - mz * ml
    ratio = mz / ml
    var_ratio = (var_z - 2.0 * ratio * cov + ratio * ratio * var_l) / (n * ml * ml)
    return ratio, math.sqrt(max(0.0, var_ratio))
