"""Earth mover's distance between advice distributions, worst-case
perturbations of the adversarial continuous advice, and the smooth-degradation
bound check.

On the line the optimal transport cost between two distributions equals the
integral of the absolute CDF difference; that closed form is what we compute,
integrating exactly over step functions and with high-order quadrature between
the CDF breakpoints otherwise.  Tests validate it against an independent
greedy transport oracle on point masses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .distributions import (
    AdviceDistribution,
    AdversarialContinuous,
    PerturbedContinuous,
    PointSet,
    shifted,
)
from .schedule import GeometricSchedule, snap_to_int
from .selection import performance_under

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)
_SCAN_POINTS = 33


def _emd_point_sets(a: PointSet, b: PointSet) -> float:
    """Exact CDF-difference integral for two step CDFs."""
    xs = np.unique(np.concatenate([np.array([t for t, _ in d.points]) for d in (a, b)]))
    fa = np.asarray(a.cdf(xs), dtype=float)
    fb = np.asarray(b.cdf(xs), dtype=float)
    return float(np.dot(np.abs(fa - fb)[:-1], np.diff(xs)))


def _knots(mu: AdviceDistribution, nu: AdviceDistribution) -> np.ndarray:
    pts: list[float] = []
    for d in (mu, nu):
        pts.extend(d.breakpoints())
        lo, hi = d.effective_support(tail=1e-15)
        pts.extend((lo, hi))
        if math.isinf(d.support()[1]):
            # mass-equal knots tame the unbounded tail pieces
            pts.extend(np.asarray(d.quantile(np.arange(1, 32) / 32.0), dtype=float).tolist())
    xs = np.unique(np.asarray(pts, dtype=float))
    keep = np.concatenate(([True], np.diff(xs) > 1e-15 * np.maximum(1.0, np.abs(xs[1:]))))
    return xs[keep]


def _integrate_piece(h, x1: float, x2: float) -> float:
    """Integral of |h| over [x1, x2] for h smooth inside the piece."""
    grid = np.linspace(x1, x2, _SCAN_POINTS)[1:-1]
    vals = h(grid)
    cuts = [x1]
    for k in range(len(grid) - 1):
        if vals[k] == 0.0 or vals[k] * vals[k + 1] < 0.0:
            lo, hi = grid[k], grid[k + 1]
            if vals[k] == 0.0:
                cuts.append(float(lo))
            elif h(np.array([lo]))[0] * h(np.array([hi]))[0] < 0.0:
                cuts.append(float(brentq(lambda x: float(h(np.array([x]))[0]), lo, hi,
                                         xtol=1e-15 * max(1.0, abs(hi)), rtol=8.9e-16)))
    cuts.append(x2)
    total = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        if hi <= lo:
            continue
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        total += abs(half * float(np.dot(_GL_WEIGHTS, h(mid + half * _GL_NODES))))
    return total


def emd(mu: AdviceDistribution, nu: AdviceDistribution) -> float:
    """Transport distance: integral of |F_mu - F_nu| over the line.

    Exact for pairs of point sets; elsewhere integrated piecewise between the
    union of the two CDFs' breakpoints (plus mass-equal knots), splitting each
    piece at sign changes of the difference.
    """
    if isinstance(mu, PointSet) and isinstance(nu, PointSet):
        return _emd_point_sets(mu, nu)

    def h(x: np.ndarray) -> np.ndarray:
        return np.asarray(mu.cdf(x), dtype=float) - np.asarray(nu.cdf(x), dtype=float)

    xs = _knots(mu, nu)
    return sum(_integrate_piece(h, x1, x2) for x1, x2 in zip(xs, xs[1:]))


# ---------------------------------------------------------------------------
# worst-case perturbations of the adversarial continuous advice
# ---------------------------------------------------------------------------

def _require_adversarial(mu: AdviceDistribution) -> AdversarialContinuous:
    if not isinstance(mu, AdversarialContinuous):
        raise TypeError("perturbations are defined for AdversarialContinuous advice")
    return mu


def _check_eta(eta: float, D: float) -> None:
    if not (0.0 < eta < D / 512.0):
        raise ValueError(f"require 0 < eta < D/512, got eta={eta}, D={D}")


def _slice_cost(D: float, x1: float, x2: float, dest: float) -> float:
    """Transport cost of moving the density of [x1, x2] to a point outside it."""
    if dest <= x1:
        return 2.0 * D * (math.log(x2 / x1) + dest * (1.0 / x2 - 1.0 / x1))
    if dest >= x2:
        return 2.0 * D * (dest * (1.0 / x1 - 1.0 / x2) - math.log(x2 / x1))
    raise ValueError("destination must lie outside the band")


def profit_breakpoint(D: float, phase: float) -> float:
    """The unique completion time of the phase's schedule in (D, 2D]; if it
    lands exactly on 2D the half-open convention returns the one at D."""
    if D <= 0.0:
        raise ValueError(f"D must be positive, got {D}")
    e = math.log2(D) + phase
    j = math.floor(snap_to_int(e)) + 1
    if snap_to_int(j - phase - (math.log2(D) + 1.0)) == 0.0:
        j -= 1
    return 2.0 ** (j - phase)


def perturb_boundary(mu_D: AdviceDistribution, eta: float, phase: float) -> PerturbedContinuous:
    """Relocate the mass just above the schedule's completion breakpoint to
    just below it, spending transport budget exactly eta.

    The slice [b, b+delta] lands at b*(1 - 1e-12): one step onto the
    unprofitable side of the boundary, which strictly reduces the expected
    profit of the phase's schedule.  When the slice reaches the top of the
    support before the budget is spent (breakpoint close to 2D), the residual
    budget moves mass from just below the boundary upward onto the same atom,
    which leaves the profit unchanged and keeps emd(mu_D, result) == eta.
    """
    base = _require_adversarial(mu_D)
    D = base.D
    _check_eta(eta, D)
    if not (0.0 <= phase < 1.0):
        raise ValueError(f"phase must lie in [0, 1), got {phase}")
    b = profit_breakpoint(D, phase)
    dest = b * (1.0 - 1e-12)
    top = 2.0 * D

    full_cost = _slice_cost(D, b, top, dest)
    if full_cost >= eta:
        width = brentq(
            lambda w: _slice_cost(D, b, b + w, dest) - eta,
            0.0,
            top - b,
            xtol=1e-18 * b,
            rtol=8.9e-16,
        )
        bands = ((b, b + width),)
    else:
        residual = eta - full_cost
        lower = brentq(
            lambda a: _slice_cost(D, a, dest, dest) - residual,
            D,
            dest,
            xtol=1e-18 * b,
            rtol=8.9e-16,
        )
        bands = ((lower, dest), (b, top))

    mass = 0.0
    for lo, hi in bands:
        mass += float(base.mass_below(hi)) - float(base.mass_below(lo))
    return PerturbedContinuous(D, removed=bands, atoms=((dest, mass),))


def perturb_split(mu_D: AdviceDistribution, eta: float, center_frac: float = 1.5) -> PerturbedContinuous:
    """Split the mass of a band around center_frac*D onto the band's two
    endpoints, with the band width chosen so the transport cost equals eta."""
    base = _require_adversarial(mu_D)
    D = base.D
    _check_eta(eta, D)
    x0 = center_frac * D
    if not (D < x0 < 2.0 * D):
        raise ValueError("split center must lie strictly inside (D, 2D)")
    w_cap = min(x0 - D, 2.0 * D - x0)

    def cost(w: float) -> float:
        if w <= 0.0:
            return 0.0
        return _slice_cost(D, x0 - w, x0, x0 - w) + _slice_cost(D, x0, x0 + w, x0 + w)

    if cost(w_cap) < eta:
        raise ValueError("eta too large for a split centered here")
    width = brentq(lambda w: cost(w) - eta, 0.0, w_cap, xtol=1e-18 * x0, rtol=8.9e-16)
    lo, hi = x0 - width, x0 + width
    m_low = float(base.mass_below(x0)) - float(base.mass_below(lo))
    m_high = float(base.mass_below(hi)) - float(base.mass_below(x0))
    return PerturbedContinuous(D, removed=((lo, hi),), atoms=((lo, m_low), (hi, m_high)))


def rigid_shift(mu_D: AdviceDistribution, offset: float) -> AdviceDistribution:
    """Translate the advice by `offset`; transport distance |offset|."""
    return shifted(mu_D, offset)


# ---------------------------------------------------------------------------
# smooth-degradation bound
# ---------------------------------------------------------------------------

def smoothness_bound(eta: float, D: float) -> float:
    """Worst ratio guaranteed under advice error eta:
    (4 ln 2 + 2 eta/D) / (1 - 16 sqrt(2 eta/D)), valid for eta < D/512."""
    _check_eta(eta, D)
    return (4.0 * math.log(2.0) + 2.0 * eta / D) / (1.0 - 16.0 * math.sqrt(2.0 * eta / D))


@dataclass(frozen=True)
class SmoothnessCheck:
    ratio: float
    eta: float
    bound: float
    ok: bool


def smoothness_check(phase: float, D: float, mu_prime: AdviceDistribution) -> SmoothnessCheck:
    """Measure the realized ratio of the phase's schedule under mu_prime and
    compare it against the degradation bound at eta = emd(mu_D, mu_prime)."""
    mu_d = AdversarialContinuous(D)
    eta = emd(mu_d, mu_prime)
    if eta >= D / 512.0:
        raise ValueError(f"advice error {eta} outside the smooth regime (< D/512)")
    ratio = performance_under(GeometricSchedule(phase), mu_prime)
    bound = smoothness_bound(eta, D) if eta > 0.0 else 4.0 * math.log(2.0)
    return SmoothnessCheck(ratio=ratio, eta=eta, bound=bound, ok=ratio <= bound + 1e-9)
