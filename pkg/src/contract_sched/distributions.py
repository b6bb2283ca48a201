"""Advice distributions over interruption times.

Every distribution exposes an exact analytic mean, an exact CDF (split into
``cdf`` = P(z <= x) and ``mass_below`` = P(z < x) so that point masses follow
the same inclusive-boundary convention as the schedules), inverse-CDF
sampling, and the list of points where its CDF is non-smooth (used by the
transport-distance integrator).  All instances are immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import ndtr, ndtri

MASS_TOL = 1e-12  # total probability must match 1 this closely
TAIL_MASS = 1e-12  # quantile window used for unbounded supports


class AdviceDistribution:
    """Base class for interruption-time advice."""

    kind: str = "abstract"

    # -- exact analytics -------------------------------------------------
    def mean(self) -> float:
        raise NotImplementedError

    def mass_below(self, x):
        """P(z < x); accepts a scalar or an ndarray."""
        raise NotImplementedError

    def cdf(self, x):
        """P(z <= x); differs from mass_below only at point masses."""
        return self.mass_below(x)

    def interval_mass(self, a: float, b: float) -> float:
        """P(z in [a, b)): left-closed, right-open.

        A point mass exactly at a is included, one exactly at b is excluded,
        matching the schedules' inclusive completion boundary.
        """
        if not (0.0 < a <= b):
            raise ValueError(f"require 0 < a <= b, got a={a}, b={b}")
        return max(0.0, float(self.mass_below(b)) - float(self.mass_below(a)))

    # -- support and sampling --------------------------------------------
    def support(self) -> tuple[float, float]:
        """Smallest closed interval carrying all mass (hi may be inf)."""
        raise NotImplementedError

    def effective_support(self, tail: float = TAIL_MASS) -> tuple[float, float]:
        """Support window for breakpoint sums; trims `tail` mass per side
        when the true support is unbounded."""
        lo, hi = self.support()
        if math.isinf(hi):
            return self.quantile(tail), self.quantile(1.0 - tail)
        return lo, hi

    def quantile(self, u):
        """Generalized inverse CDF: inf{x : P(z <= x) >= u}.

        Numeric fallback by bisection; subclasses override with closed forms.
        """
        scalar = np.isscalar(u)
        us = np.atleast_1d(np.asarray(u, dtype=float))
        lo, hi = self.support()
        if math.isinf(hi):
            hi = 2.0
            while float(self.cdf(hi)) < 1.0 - 1e-300:
                hi *= 2.0
        out = np.empty_like(us)
        for k, uk in enumerate(us):
            a, b = lo, hi
            for _ in range(200):
                m = 0.5 * (a + b)
                if float(self.cdf(m)) >= uk:
                    b = m
                else:
                    a = m
            out[k] = b
        return float(out[0]) if scalar else out

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Inverse-CDF sampling from a seeded generator."""
        return np.asarray(self.quantile(rng.random(size)), dtype=float)

    def breakpoints(self) -> tuple[float, ...]:
        """Sorted points where the CDF jumps or kinks (finite list)."""
        raise NotImplementedError


def _check_support_positive(lo: float) -> None:
    if lo <= 0.0:
        raise ValueError("support must lie in (0, inf)")


@dataclass(frozen=True)
class PointSet(AdviceDistribution):
    """Finitely many interruption times with probability masses."""

    points: tuple[tuple[float, float], ...]
    _times: np.ndarray = field(init=False, repr=False, compare=False)
    _masses: np.ndarray = field(init=False, repr=False, compare=False)
    _cum: np.ndarray = field(init=False, repr=False, compare=False)

    kind = "PointSet"

    def __init__(self, points: Sequence[tuple[float, float]]):
        merged: dict[float, float] = {}
        for t, m in points:
            t, m = float(t), float(m)
            if m <= 0.0 or m > 1.0 + MASS_TOL:
                raise ValueError(f"mass {m} outside (0, 1]")
            merged[t] = merged.get(t, 0.0) + m
        times = np.array(sorted(merged), dtype=float)
        if times.size == 0:
            raise ValueError("point set must be nonempty")
        _check_support_positive(float(times[0]))
        masses = np.array([merged[t] for t in times], dtype=float)
        total = float(masses.sum())
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"masses sum to {total}, expected 1")
        object.__setattr__(self, "points", tuple(zip(times.tolist(), masses.tolist())))
        object.__setattr__(self, "_times", times)
        object.__setattr__(self, "_masses", masses)
        object.__setattr__(self, "_cum", np.concatenate(([0.0], np.cumsum(masses))))

    def mean(self) -> float:
        return float(np.dot(self._times, self._masses))

    def mass_below(self, x):
        idx = np.searchsorted(self._times, x, side="left")
        out = self._cum[idx]
        return float(out) if np.isscalar(x) else out

    def cdf(self, x):
        idx = np.searchsorted(self._times, x, side="right")
        out = self._cum[idx]
        return float(out) if np.isscalar(x) else out

    def quantile(self, u):
        idx = np.searchsorted(self._cum[1:], u, side="left")
        idx = np.minimum(idx, self._times.size - 1)
        out = self._times[idx]
        return float(out) if np.isscalar(u) else out

    def support(self) -> tuple[float, float]:
        return float(self._times[0]), float(self._times[-1])

    def breakpoints(self) -> tuple[float, ...]:
        return tuple(self._times.tolist())


@dataclass(frozen=True)
class Uniform(AdviceDistribution):
    """Uniform advice on [lo, hi], 0 < lo < hi."""

    lo: float
    hi: float

    kind = "Uniform"

    def __post_init__(self) -> None:
        if not (0.0 < self.lo < self.hi):
            raise ValueError(f"require 0 < lo < hi, got ({self.lo}, {self.hi})")

    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def mass_below(self, x):
        out = np.clip((np.asarray(x, dtype=float) - self.lo) / (self.hi - self.lo), 0.0, 1.0)
        return float(out) if np.isscalar(x) else out

    def quantile(self, u):
        out = self.lo + np.asarray(u, dtype=float) * (self.hi - self.lo)
        return float(out) if np.isscalar(u) else out

    def support(self) -> tuple[float, float]:
        return self.lo, self.hi

    def breakpoints(self) -> tuple[float, ...]:
        return (self.lo, self.hi)


@dataclass(frozen=True)
class TruncatedNormal(AdviceDistribution):
    """Normal advice restricted to (0, inf) and renormalized.

    `m` and `sigma` are the location and scale of the parent normal; the
    truncated mean follows the standard conditional-mean formula.
    """

    m: float
    sigma: float

    kind = "TruncatedNormal"

    def __post_init__(self) -> None:
        if self.sigma <= 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self._kept() <= 0.0:
            raise ValueError("no probability mass remains above the truncation point")

    def _kept(self) -> float:
        # mass of the parent normal on (0, inf)
        return float(ndtr(self.m / self.sigma))

    def mean(self) -> float:
        alpha = -self.m / self.sigma
        phi = math.exp(-0.5 * alpha * alpha) / math.sqrt(2.0 * math.pi)
        return self.m + self.sigma * phi / self._kept()

    def mass_below(self, x):
        xs = np.asarray(x, dtype=float)
        below0 = float(ndtr(-self.m / self.sigma))
        out = (ndtr((xs - self.m) / self.sigma) - below0) / self._kept()
        out = np.clip(out, 0.0, 1.0)
        out = np.where(xs <= 0.0, 0.0, out)
        return float(out) if np.isscalar(x) else out

    def quantile(self, u):
        below0 = float(ndtr(-self.m / self.sigma))
        out = self.m + self.sigma * ndtri(below0 + np.asarray(u, dtype=float) * self._kept())
        return float(out) if np.isscalar(u) else out

    def support(self) -> tuple[float, float]:
        return 0.0, math.inf

    def breakpoints(self) -> tuple[float, ...]:
        return (self.quantile(1e-15),)


@dataclass(frozen=True)
class AdversarialContinuous(AdviceDistribution):
    """The consistency-maximizing continuous advice on [D, 2D].

    Density 2D/x**2, CDF F(x) = 2 - 2D/x; its mean is 2*D*ln(2) and every
    4-robust schedule earns expected profit exactly D/2 against it.
    """

    D: float

    kind = "AdversarialContinuous"

    def __post_init__(self) -> None:
        if self.D <= 0.0:
            raise ValueError(f"D must be positive, got {self.D}")

    def mean(self) -> float:
        return 2.0 * self.D * math.log(2.0)

    def mass_below(self, x):
        xs = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.clip(2.0 - 2.0 * self.D / np.maximum(xs, self.D), 0.0, 1.0)
        return float(out) if np.isscalar(x) else out

    def quantile(self, u):
        out = 2.0 * self.D / (2.0 - np.asarray(u, dtype=float))
        return float(out) if np.isscalar(u) else out

    def support(self) -> tuple[float, float]:
        return self.D, 2.0 * self.D

    def breakpoints(self) -> tuple[float, ...]:
        return (self.D, 2.0 * self.D)


class AdversarialDiscrete(PointSet):
    """The n-point advice that pins every listed schedule phase at the
    portfolio consistency bound; built by :func:`adversarial_discrete`."""

    kind = "AdversarialDiscrete"

    def __init__(self, points, phases: tuple[float, ...], eps: float):
        super().__init__(points)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "eps", eps)


def adversarial_discrete(phases: Sequence[float], eps: float = 1e-9) -> AdversarialDiscrete:
    """Worst-case point advice against the schedules with the given phases.

    Point k sits a hair (factor 2**-eps) below the critical time of phase
    phases[k]; the masses telescope to exactly 1.  Smaller eps tightens the
    construction; induced slack in tightness checks scales linearly with eps.
    """
    lams = [float(x) for x in phases]
    if not lams:
        raise ValueError("need at least one phase")
    if any(b <= a for a, b in zip(lams, lams[1:])):
        raise ValueError("phases must be strictly increasing")
    if not (0.0 <= lams[0] and lams[-1] < 1.0):
        raise ValueError("phases must lie in [0, 1)")
    if not (0.0 < eps < 0.1):
        raise ValueError(f"eps must lie in (0, 0.1), got {eps}")
    n = len(lams)
    times = [2.0 ** (2.0 - lam - eps) for lam in lams]
    masses = [2.0 ** (lams[k + 1] - lams[0]) - 2.0 ** (lams[k] - lams[0]) for k in range(n - 1)]
    masses.append(2.0 - 2.0 ** (lams[-1] - lams[0]))
    return AdversarialDiscrete(list(zip(times, masses)), tuple(lams), eps)


def adversarial_continuous(D: float) -> AdversarialContinuous:
    """Worst-case continuous advice: density 2D/x**2 on [D, 2D]."""
    return AdversarialContinuous(D)


@dataclass(frozen=True)
class Shifted(AdviceDistribution):
    """`inner` rigidly translated by `offset` (support must stay positive)."""

    inner: AdviceDistribution
    offset: float

    kind = "Shifted"

    def __post_init__(self) -> None:
        _check_support_positive(self.inner.support()[0] + self.offset)

    def mean(self) -> float:
        return self.inner.mean() + self.offset

    def mass_below(self, x):
        return self.inner.mass_below(np.asarray(x, dtype=float) - self.offset) if not np.isscalar(x) \
            else self.inner.mass_below(x - self.offset)

    def cdf(self, x):
        return self.inner.cdf(np.asarray(x, dtype=float) - self.offset) if not np.isscalar(x) \
            else self.inner.cdf(x - self.offset)

    def quantile(self, u):
        q = self.inner.quantile(u)
        return q + self.offset

    def support(self) -> tuple[float, float]:
        lo, hi = self.inner.support()
        return lo + self.offset, hi + self.offset

    def effective_support(self, tail: float = TAIL_MASS) -> tuple[float, float]:
        lo, hi = self.inner.effective_support(tail)
        return lo + self.offset, hi + self.offset

    def breakpoints(self) -> tuple[float, ...]:
        return tuple(b + self.offset for b in self.inner.breakpoints())


def shifted(dist: AdviceDistribution, offset: float) -> AdviceDistribution:
    """Rigidly shift a distribution along the time axis."""
    if offset == 0.0:
        return dist
    return Shifted(dist, offset)


@dataclass(frozen=True)
class PerturbedContinuous(AdviceDistribution):
    """Adversarial-continuous advice with mass carved out of bands and
    re-deposited as point masses; carrier type for transport perturbations.

    `removed` lists disjoint [lo, hi] sub-bands of [D, 2D] whose density is
    deleted; `atoms` lists (position, mass) pairs re-inserting exactly the
    deleted mass elsewhere.
    """

    D: float
    removed: tuple[tuple[float, float], ...]
    atoms: tuple[tuple[float, float], ...]

    kind = "PerturbedContinuous"

    def __post_init__(self) -> None:
        base = AdversarialContinuous(self.D)
        bands = sorted(self.removed)
        for (a1, b1), (a2, b2) in zip(bands, bands[1:]):
            if b1 > a2:
                raise ValueError("removed bands must be disjoint")
        removed_mass = 0.0
        for a, b in bands:
            if not (self.D <= a <= b <= 2.0 * self.D):
                raise ValueError("removed bands must lie inside [D, 2D]")
            removed_mass += float(base.mass_below(b) - base.mass_below(a))
        atom_mass = sum(m for _, m in self.atoms)
        if abs(removed_mass - atom_mass) > MASS_TOL:
            raise ValueError("atom mass must equal removed band mass")
        if self.atoms:
            _check_support_positive(min(t for t, _ in self.atoms))

    def _base(self) -> AdversarialContinuous:
        return AdversarialContinuous(self.D)

    def mean(self) -> float:
        # band mean contribution: integral of x * 2D/x**2 = 2D * ln(hi/lo)
        total = self._base().mean()
        for a, b in self.removed:
            total -= 2.0 * self.D * math.log(b / a)
        for t, m in self.atoms:
            total += t * m
        return total

    def _strip(self, x, strict: bool):
        base = self._base()
        xs = np.asarray(x, dtype=float)
        out = np.asarray(base.mass_below(xs), dtype=float).copy()
        for a, b in self.removed:
            clipped = np.clip(xs, a, b)
            out -= np.asarray(base.mass_below(clipped), dtype=float) - float(base.mass_below(a))
        for t, m in self.atoms:
            out = out + np.where(xs > t if strict else xs >= t, m, 0.0)
        return float(out) if np.isscalar(x) else out

    def mass_below(self, x):
        return self._strip(x, strict=True)

    def cdf(self, x):
        return self._strip(x, strict=False)

    def support(self) -> tuple[float, float]:
        lo, hi = self.D, 2.0 * self.D
        if self.atoms:
            lo = min(lo, min(t for t, _ in self.atoms))
            hi = max(hi, max(t for t, _ in self.atoms))
        return lo, hi

    def breakpoints(self) -> tuple[float, ...]:
        pts = [self.D, 2.0 * self.D]
        for a, b in self.removed:
            pts += [a, b]
        pts += [t for t, _ in self.atoms]
        return tuple(sorted(set(pts)))
