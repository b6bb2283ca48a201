"""Schedules tuned to a finite set of candidate interruption times.

Each prediction decomposes as tau = 2**(octave + frac) with frac in [0, 1);
only the fractional parts matter, viewed as points on a unit circle.  The
best 4-robust schedule aligns its completion times with one of the
predictions; it can be found either by exhaustive candidate scoring (k**2
profit evaluations) or, equivalently, by picking the prediction whose
clockwise gap to its circle predecessor is largest (k log k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .schedule import GeometricSchedule, profits, snap_to_int


def decompose_time(tau: float) -> tuple[int, float]:
    """Split tau as 2**(octave + frac) with frac in [0, 1).

    log2(tau) within 4 ulps of an integer snaps to frac = 0, so powers of two
    decompose exactly.
    """
    if tau <= 0.0:
        raise ValueError(f"time must be positive, got {tau}")
    e = snap_to_int(math.log2(tau))
    octave = math.floor(e)
    return octave, e - octave


@dataclass(frozen=True)
class PredictionSet:
    """k candidate interruption times with their octave/frac decompositions."""

    times: tuple[float, ...]
    octaves: tuple[int, ...]
    fracs: tuple[float, ...]

    def __init__(self, times: Sequence[float]):
        ts = tuple(float(t) for t in times)
        if not ts:
            raise ValueError("prediction set must be nonempty")
        decomps = [decompose_time(t) for t in ts]
        object.__setattr__(self, "times", ts)
        object.__setattr__(self, "octaves", tuple(i for i, _ in decomps))
        object.__setattr__(self, "fracs", tuple(f for _, f in decomps))

    def __len__(self) -> int:
        return len(self.times)


def schedule_through(frac: float) -> GeometricSchedule:
    """The schedule whose contracts complete at every 2**(m + frac)."""
    return GeometricSchedule((1.0 - frac) % 1.0)


def worst_case_consistency(schedule: GeometricSchedule, predictions: PredictionSet) -> float:
    """Largest ratio tau / profit(schedule, tau) over the prediction set."""
    ts = np.asarray(predictions.times)
    return float(np.max(ts / profits(schedule, ts)))


def average_consistency(schedule: GeometricSchedule, predictions: PredictionSet) -> float:
    """Mean ratio tau / profit(schedule, tau) over the prediction set;
    never exceeds the worst case."""
    ts = np.asarray(predictions.times)
    return float(np.mean(ts / profits(schedule, ts)))


@dataclass(frozen=True)
class GapProfile:
    """Distinct prediction fracs on the unit circle and their clockwise gaps.

    gaps[j] is the arc length from the predecessor of fracs[j] to fracs[j];
    the first frac's gap wraps around through 1.  Gaps sum to 1.
    """

    fracs: tuple[float, ...]
    gaps: tuple[float, ...]


def gap_profile(predictions: PredictionSet) -> GapProfile:
    """Circle gaps of the distinct prediction fracs (duplicates merged)."""
    fracs = sorted(set(predictions.fracs))
    gaps = [fracs[0] + 1.0 - fracs[-1]]
    gaps += [b - a for a, b in zip(fracs, fracs[1:])]
    return GapProfile(tuple(fracs), tuple(gaps))


def _score_candidates(predictions: PredictionSet, fracs: Sequence[float]) -> tuple[int, float]:
    """Index and value of the candidate frac with the smallest worst-case
    ratio; ties break toward the smaller index."""
    best_j, best = -1, math.inf
    for j, frac in enumerate(fracs):
        alpha = worst_case_consistency(schedule_through(frac), predictions)
        if alpha < best:
            best_j, best = j, alpha
    return best_j, best


def best_schedule_exact(predictions: PredictionSet) -> tuple[GeometricSchedule, float]:
    """Optimal 4-robust schedule for the prediction set by exhaustive scoring.

    One candidate per prediction (the schedule completing a contract exactly
    there), each scored against all k predictions.  Ties break toward the
    smallest candidate index in frac-sorted order.
    """
    order = sorted(range(len(predictions)), key=lambda j: predictions.fracs[j])
    fracs = [predictions.fracs[j] for j in order]
    j, alpha = _score_candidates(predictions, fracs)
    return schedule_through(fracs[j]), alpha


def best_schedule_by_gaps(predictions: PredictionSet) -> tuple[GeometricSchedule, float]:
    """Optimal schedule via the circle-gap rule, in O(k log k).

    Aligns with the prediction whose clockwise gap to its predecessor is
    largest: that candidate's worst ratio is 2**(2 - gap), so the largest gap
    wins.  The reported value is the exact worst case of the returned
    schedule (one extra pass), which can beat the gap bound when duplicate
    fracs were merged.
    """
    profile = gap_profile(predictions)
    j = int(np.argmax(profile.gaps))
    schedule = schedule_through(profile.fracs[j])
    return schedule, worst_case_consistency(schedule, predictions)


def prediction_consistency_bound(k: int) -> float:
    """Worst-case-optimal consistency for k predictions: 2**(2 - 1/k).

    Increasing in k, from 2 at k = 1 toward the plain robustness 4.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return 2.0 ** (2.0 - 1.0 / k)
