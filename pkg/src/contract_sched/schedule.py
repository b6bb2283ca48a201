"""Geometric contract schedules and their profit/robustness arithmetic.

A schedule is a bi-infinite run of contracts whose lengths grow geometrically
with base 2; it is identified by a single phase in [0, 1).  All internal time
arithmetic happens in the log2 domain (store exponents, compare exponents) so
that indices up to +-1000 neither overflow nor flush to zero; exponentiation
happens only at API boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# Exponents this close to an integer (in units of ulp at that magnitude) are
# treated as exact: an interruption at a completion time counts the completing
# contract as done, and power-of-two inputs must land on the inclusive side
# deterministically.
SNAP_ULPS = 4


def snap_to_int(v: float) -> float:
    """Round v to the nearest integer if it is within SNAP_ULPS ulps of it."""
    r = round(v)
    if abs(v - r) <= SNAP_ULPS * math.ulp(max(1.0, abs(v))):
        return float(r)
    return v


def _snap_to_int_vec(v: np.ndarray) -> np.ndarray:
    r = np.rint(v)
    tol = SNAP_ULPS * np.spacing(np.maximum(1.0, np.abs(v)))
    return np.where(np.abs(v - r) <= tol, r, v)


@dataclass(frozen=True)
class GeometricSchedule:
    """A 4-robust schedule: contract i has length 2**(i - phase), i in Z.

    phase is a dimensionless offset in [0, 1); phase 0 is the plain doubling
    schedule.  Instances are immutable and safe to share across threads.
    """

    phase: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.phase < 1.0):
            raise ValueError(f"phase must lie in [0, 1), got {self.phase}")

    def contract_length(self, i: int) -> float:
        """Length of contract i (i may be negative)."""
        return 2.0 ** (i - self.phase)

    def completion_time(self, i: int) -> float:
        """Time at which contract i finishes: sum of all lengths up to i.

        The bi-infinite prefix sum telescopes to twice the contract length.
        """
        return 2.0 ** (i + 1 - self.phase)

    def completion_index(self, t: float) -> int:
        """Index of the last contract completed by time t (inclusive at t)."""
        if t <= 0.0:
            raise ValueError(f"time must be positive, got {t}")
        v = snap_to_int(math.log2(t) + self.phase - 1.0)
        return math.floor(v)

    def profit(self, t: float) -> float:
        """Length of the largest contract fully completed by time t.

        A contract finishing exactly at t counts as completed.
        """
        return self.contract_length(self.completion_index(t))


def completion_indices(schedule: GeometricSchedule, times: np.ndarray) -> np.ndarray:
    """Vectorized :meth:`GeometricSchedule.completion_index`."""
    t = np.asarray(times, dtype=float)
    if np.any(t <= 0.0):
        raise ValueError("times must be positive")
    v = _snap_to_int_vec(np.log2(t) + schedule.phase - 1.0)
    return np.floor(v).astype(np.int64)


def profits(schedule: GeometricSchedule, times: np.ndarray) -> np.ndarray:
    """Vectorized :meth:`GeometricSchedule.profit`."""
    idx = completion_indices(schedule, times)
    return np.exp2(idx - schedule.phase)


@dataclass(frozen=True)
class FiniteSchedule:
    """An explicit finite list of contract lengths; used as a cross-check oracle.

    Only bi-infinite geometric schedules are 4-robust, so the library proper
    works with :class:`GeometricSchedule`; this type exists to evaluate the
    acceleration ratio of arbitrary truncations.
    """

    lengths: tuple[float, ...]

    def __init__(self, lengths: Sequence[float]):
        object.__setattr__(self, "lengths", tuple(float(x) for x in lengths))
        if any(x <= 0.0 for x in self.lengths):
            raise ValueError("all contract lengths must be positive")


def acceleration_ratio_finite(schedule: FiniteSchedule) -> float:
    """Worst ratio of elapsed time to last-finished contract length.

    Evaluates max over i >= 1 of prefix_sum(i) / lengths[i-1], the value of an
    interruption just before contract i finishes.  On truncations of an
    infinite schedule this lower-bounds the bi-infinite ratio.
    """
    xs = schedule.lengths
    if len(xs) < 2:
        raise ValueError("need at least two contracts")
    best = 0.0
    prefix = xs[0]
    for i in range(1, len(xs)):
        prefix += xs[i]
        best = max(best, prefix / xs[i - 1])
    return best


def robustness_probe(schedule: GeometricSchedule, octaves: int) -> float:
    """Numerically probe the acceleration ratio of a geometric schedule.

    Evaluates t / profit(t) just before each of `octaves` consecutive
    completion times and returns the maximum.  The probe steps down in the
    log2 domain, just past the snap window of :meth:`profit`, so the
    completing contract does not yet count; the result approaches 4 from
    below.
    """
    if octaves < 1:
        raise ValueError("octaves must be >= 1")
    best = 0.0
    for i in range(octaves):
        e = i + 1 - schedule.phase
        t = 2.0 ** (e - 2 * SNAP_ULPS * math.ulp(max(1.0, abs(e))))
        best = max(best, t / schedule.profit(t))
    return best


def single_advice_schedule(tau: float) -> GeometricSchedule:
    """The schedule tuned to one predicted interruption time.

    Chooses the phase so that some contract completes exactly at tau; the
    profit at tau is then tau / 2, the best any 4-robust schedule can do.
    """
    if tau <= 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    e = snap_to_int(math.log2(tau))
    phase = math.ceil(e) - e
    if phase >= 1.0:  # guard against rounding at the top of the interval
        phase = 0.0
    return GeometricSchedule(phase)


def fragility_probe(tau: float, eps: float) -> tuple[float, float]:
    """Interrupt the single-advice schedule just before its tuned contract ends.

    Returns (t, profit) with t = tau - eps.  The tuned contract of length
    tau/2 has not finished, so the profit collapses to tau/4, i.e. exactly
    (t + eps) / 4: a vanishing advice error costs a factor-2 loss.
    """
    if eps <= 0.0 or eps >= tau / 2.0:
        raise ValueError("require 0 < eps < tau/2")
    schedule = single_advice_schedule(tau)
    t = tau - eps
    return t, schedule.profit(t)
