"""Experiment registry, deterministic sweeps, and CSV persistence.

Every experiment is a declarative sweep: a named parameter grid expanded in a
fixed order into independent pure tasks.  Tasks may run on a worker pool
(capped by CONTRACT_SCHED_THREADS), but rows are assembled in sweep order and
all randomness is derived per task from the master seed, so a run's CSV bytes
depend only on its spec.

Seed rule: the generator for trial `t` of sweep point `k` is PCG64 seeded
with splitmix64(splitmix64(master_seed) XOR ((k << 32) | t)); the splitmix64
step keeps nearby master seeds from merely permuting trial seeds.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from difflib import get_close_matches
from typing import Callable, Iterable, Sequence

import numpy as np

from .distributions import AdversarialContinuous, TruncatedNormal, Uniform
from .emd import perturb_boundary, perturb_split, rigid_shift, smoothness_check
from .multi import (
    PredictionSet,
    average_consistency,
    best_schedule_exact,
    prediction_consistency_bound,
)
from .selection import best_in_portfolio, performance_under

ENV_THREADS = "CONTRACT_SCHED_THREADS"


class UnknownExperimentError(LookupError):
    def __init__(self, name: str, suggestion: str | None):
        hint = f"; did you mean '{suggestion}'?" if suggestion else ""
        super().__init__(f"unknown experiment '{name}'{hint}")
        self.name = name
        self.suggestion = suggestion


class ParameterError(ValueError):
    """Invalid sweep parameter (bad range, unknown name, bad value)."""


@dataclass(frozen=True)
class Range:
    """A sweep axis: `steps` points from lo to hi, linear or log spaced."""

    lo: float
    hi: float
    steps: int
    spacing: str = "linear"

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ParameterError(f"range needs >= 1 steps, got {self.steps}")
        if self.hi < self.lo:
            raise ParameterError(f"range lo {self.lo} exceeds hi {self.hi}")
        if self.spacing not in ("linear", "log"):
            raise ParameterError(f"spacing must be linear or log, got {self.spacing!r}")
        if self.spacing == "log" and self.lo <= 0.0:
            raise ParameterError("log spacing requires lo > 0")

    def values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.lo])
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.steps)
        return np.linspace(self.lo, self.hi, self.steps)

    @staticmethod
    def integer_grid(lo: int, hi: int) -> "Range":
        return Range(float(lo), float(hi), hi - lo + 1, "linear")


@dataclass(frozen=True)
class ExperimentSpec:
    """What to run: experiment name, parameter overrides, seed, output path."""

    name: str
    output_path: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    trials: int | None = None


_M64 = 0xFFFFFFFFFFFFFFFF


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def derive_seed(master: int, point: int, trial: int = 0) -> int:
    """Task seed for (sweep point, trial); see module docstring."""
    return _splitmix64(_splitmix64(master & _M64) ^ ((point << 32) | trial))


def _as_int(value, name: str) -> int:
    out = int(round(float(value)))
    if abs(out - float(value)) > 1e-9:
        raise ParameterError(f"{name} must be an integer, got {value}")
    return out


def _as_list(value) -> list:
    if isinstance(value, Range):
        return list(value.values())
    if isinstance(value, (list, tuple, np.ndarray)):
        return list(value)
    return [value]


@dataclass(frozen=True)
class ExperimentDef:
    name: str
    description: str
    defaults: dict
    columns: tuple[str, ...]
    runner: Callable

    def params_for(self, spec: ExperimentSpec) -> dict:
        params = dict(self.defaults)
        for key, value in spec.parameters.items():
            if key not in params:
                raise ParameterError(
                    f"experiment {self.name} has no parameter '{key}' "
                    f"(available: {', '.join(sorted(params))})"
                )
            params[key] = value
        if spec.trials is not None:
            if "trials" not in params:
                raise ParameterError(f"experiment {self.name} takes no trials")
            params["trials"] = spec.trials
        return params


def _pool_map(fn: Callable, tasks: Sequence, workers: int) -> list:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def resolve_workers(explicit: int | None = None) -> int:
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get(ENV_THREADS)
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ParameterError(f"{ENV_THREADS} must be an integer, got {env!r}") from exc
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# experiment implementations
# ---------------------------------------------------------------------------

def _portfolio_sweep_rows(name, grid, n_values, make_dist, pmap):
    tasks = [(x, n) for x in grid for n in n_values]

    def run(task):
        x, n = task
        report = best_in_portfolio(make_dist(float(x)), n)
        return (name, float(x), n, report.consistency)

    return pmap(run, tasks)


def _run_fig_normal(d: ExperimentDef, params, seed, pmap):
    grid = _as_list(params["m"])
    ns = [_as_int(n, "n") for n in _as_list(params["n"])]
    scale = float(params["sigma_scale"])
    return _portfolio_sweep_rows(
        d.name, grid, ns, lambda m: TruncatedNormal(m, scale * m), pmap
    )


def _run_fig_uniform(d: ExperimentDef, params, seed, pmap):
    grid = _as_list(params["t"])
    ns = [_as_int(n, "n") for n in _as_list(params["n"])]
    width = float(params["width"])
    if not (0.0 < width < 1.0):
        raise ParameterError(f"width must be in (0, 1), got {width}")
    return _portfolio_sweep_rows(
        d.name, grid, ns, lambda t: Uniform((1.0 - width) * t, (1.0 + width) * t), pmap
    )


def _run_fig_mult(d: ExperimentDef, params, seed, pmap):
    ks = [_as_int(k, "k") for k in _as_list(params["k"])]
    trials = _as_int(params["trials"], "trials")
    tau_lo, tau_hi = float(params["tau_lo"]), float(params["tau_hi"])
    if not (0.0 < tau_lo < tau_hi):
        raise ParameterError("require 0 < tau_lo < tau_hi")
    tasks = [(k, t) for k in ks for t in range(trials)]

    def run(task):
        k, trial = task
        rng = np.random.default_rng(derive_seed(seed, k, trial))
        preds = PredictionSet(rng.uniform(tau_lo, tau_hi, k))
        schedule, worst = best_schedule_exact(preds)
        return worst, average_consistency(schedule, preds)

    results = pmap(run, tasks)
    rows = []
    for i, k in enumerate(ks):
        chunk = results[i * trials : (i + 1) * trials]
        worst_mean = float(np.mean([w for w, _ in chunk]))
        avg_mean = float(np.mean([a for _, a in chunk]))
        rows.append((d.name, k, worst_mean, avg_mean, prediction_consistency_bound(k)))
    return rows


def _run_app_horizon(d: ExperimentDef, params, seed, pmap):
    grid = _as_list(params["m"])
    ns = [_as_int(n, "n") for n in _as_list(params["n"])]
    dist = str(params["dist"])
    if dist == "normal":
        scale = float(params["sigma_scale"])
        make = lambda m: TruncatedNormal(m, scale * m)
    elif dist == "uniform":
        width = float(params["width"])
        make = lambda t: Uniform((1.0 - width) * t, (1.0 + width) * t)
    else:
        raise ParameterError(f"dist must be normal or uniform, got {dist!r}")
    return _portfolio_sweep_rows(d.name, grid, ns, make, pmap)


def _run_app_fixed_sigma(d: ExperimentDef, params, seed, pmap):
    grid = _as_list(params["m"])
    ns = [_as_int(n, "n") for n in _as_list(params["n"])]
    sigma = float(params["sigma"])
    return _portfolio_sweep_rows(d.name, grid, ns, lambda m: TruncatedNormal(m, sigma), pmap)


def _run_app_sigma_scale(d: ExperimentDef, params, seed, pmap):
    scales = [float(s) for s in _as_list(params["sigma_scale"])]
    grid = _as_list(params["m"])
    ns = [_as_int(n, "n") for n in _as_list(params["n"])]
    tasks = [(s, m, n) for s in scales for m in grid for n in ns]

    def run(task):
        s, m, n = task
        report = best_in_portfolio(TruncatedNormal(float(m), s * float(m)), n)
        return (d.name, s, float(m), n, report.consistency)

    return pmap(run, tasks)


def _run_app_error(d: ExperimentDef, params, seed, pmap):
    ms = [float(m) for m in _as_list(params["m"])]
    sigma = float(params["sigma"])
    n = _as_int(params["n"], "n")
    grid = _as_list(params["m_prime"])
    advised = {m: best_in_portfolio(TruncatedNormal(m, sigma), n).schedule for m in ms}
    tasks = [(m, mp) for m in ms for mp in grid]

    def run(task):
        m, mp = task
        actual = TruncatedNormal(float(mp), sigma)
        return (
            d.name,
            m,
            float(mp),
            performance_under(advised[m], actual),
            best_in_portfolio(actual, n).consistency,
        )

    return pmap(run, tasks)


def _run_smoothness(d: ExperimentDef, params, seed, pmap):
    ds = [float(x) for x in _as_list(params["D"])]
    lams = [float(x) for x in _as_list(params["lambda"])]
    fracs = [float(x) for x in _as_list(params["eta_frac"])]
    kinds = [str(x) for x in _as_list(params["perturbation"])]
    tasks = [(D, lam, f, kind) for D in ds for lam in lams for f in fracs for kind in kinds]

    def run(task):
        D, lam, frac, kind = task
        mu = AdversarialContinuous(D)
        eta = frac * D
        if kind == "boundary":
            mu_prime = perturb_boundary(mu, eta, lam)
        elif kind == "shift":
            mu_prime = rigid_shift(mu, -eta)
        elif kind == "split":
            mu_prime = perturb_split(mu, eta)
        else:
            raise ParameterError(f"perturbation must be boundary/shift/split, got {kind!r}")
        check = smoothness_check(lam, D, mu_prime)
        return (d.name, D, lam, frac, kind, check.eta, check.ratio, check.bound,
                1 if check.ok else 0)

    return pmap(run, tasks)


_N_DEFAULT = (1, 2, 3, 4)

REGISTRY: dict[str, ExperimentDef] = {}


def _register(name, description, defaults, columns, runner):
    REGISTRY[name] = ExperimentDef(name, description, defaults, columns, runner)


_register(
    "fig_normal",
    "portfolio consistency vs mean of truncated-normal advice, sigma = sigma_scale * m",
    {"m": Range.integer_grid(1, 1024), "sigma_scale": 0.05, "n": _N_DEFAULT},
    ("experiment", "m", "n", "consistency"),
    _run_fig_normal,
)
_register(
    "fig_uniform",
    "portfolio consistency vs t for uniform advice on [(1-width)t, (1+width)t]",
    {"t": Range.integer_grid(1, 1024), "width": 0.05, "n": _N_DEFAULT},
    ("experiment", "t", "n", "consistency"),
    _run_fig_uniform,
)
_register(
    "fig_mult",
    "mean worst/average consistency of the multi-advice schedule vs k",
    {"k": Range.integer_grid(1, 10), "trials": 1000, "tau_lo": 1.0, "tau_hi": 1024.0},
    ("experiment", "k", "worst_consistency_mean", "avg_consistency_mean", "bound"),
    _run_fig_mult,
)
_register(
    "app_horizon",
    "fig_normal/fig_uniform sweep on the larger horizon [1, 20000]",
    {"m": Range.integer_grid(1, 20000), "dist": "normal", "sigma_scale": 0.05,
     "width": 0.05, "n": _N_DEFAULT},
    ("experiment", "m", "n", "consistency"),
    _run_app_horizon,
)
_register(
    "app_fixed_sigma",
    "truncated-normal advice with fixed sigma",
    {"m": Range.integer_grid(1, 1024), "sigma": 10.0, "n": _N_DEFAULT},
    ("experiment", "m", "n", "consistency"),
    _run_app_fixed_sigma,
)
_register(
    "app_sigma_scale",
    "truncated-normal advice with sigma proportional to m, several scales",
    {"sigma_scale": (0.01, 0.2), "m": Range.integer_grid(1, 1024), "n": _N_DEFAULT},
    ("experiment", "sigma_scale", "m", "n", "consistency"),
    _run_app_sigma_scale,
)
_register(
    "app_error",
    "realized performance when advice mean m differs from actual mean m_prime",
    {"m": (500.0, 700.0), "sigma": 25.0, "n": 16, "m_prime": Range.integer_grid(250, 950)},
    ("experiment", "m", "m_prime", "performance", "error_free_consistency"),
    _run_app_error,
)
_register(
    "smoothness",
    "degradation-bound check over D, lambda, eta and perturbation kind",
    {"D": Range(1e-3, 1e6, 7, "log"), "lambda": Range(0.0, 0.9, 10),
     "eta_frac": (1e-5, 1.0 / 4096.0, 1.0 / 1024.0),
     "perturbation": ("boundary", "shift", "split")},
    ("experiment", "D", "lambda", "eta_frac", "perturbation", "eta", "ratio", "bound", "ok"),
    _run_smoothness,
)


def lookup(name: str) -> ExperimentDef:
    if name not in REGISTRY:
        close = get_close_matches(name, REGISTRY, n=1)
        raise UnknownExperimentError(name, close[0] if close else None)
    return REGISTRY[name]


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path: str, columns: Iterable[str], rows: Iterable[tuple]) -> None:
    lines = [",".join(columns)]
    lines.extend(",".join(format_cell(c) for c in row) for row in rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def run_experiment(spec: ExperimentSpec, workers: int | None = None) -> list[tuple]:
    """Run the named experiment and write its CSV; returns the rows.

    Identical specs produce byte-identical CSVs, for any worker count.
    """
    definition = lookup(spec.name)
    params = definition.params_for(spec)
    count = resolve_workers(workers)
    rows = definition.runner(
        definition, params, spec.seed, lambda fn, tasks: _pool_map(fn, tasks, count)
    )
    write_csv(spec.output_path, definition.columns, rows)
    return rows


def describe_registry() -> str:
    out = []
    for name in sorted(REGISTRY):
        d = REGISTRY[name]
        out.append(f"{name}: {d.description}")
        out.append(f"  columns: {', '.join(d.columns)}")
        for key, value in d.defaults.items():
            if isinstance(value, Range):
                shown = f"{value.lo:g}:{value.hi:g}:{value.steps}:{value.spacing}"
            elif isinstance(value, tuple):
                shown = ",".join(format_cell(v) for v in value)
            else:
                shown = format_cell(value)
            out.append(f"  {key} = {shown}")
    return "\n".join(out)
