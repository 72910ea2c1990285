"""Seeded Monte Carlo paths and martingale / orthogonality checks.

Paths are generated in fixed blocks of :data:`BLOCK_SIZE`.  Every
(block, leaf component) pair draws from its own Philox stream keyed by
``SeedSequence(seed, spawn_key=(block, component))``, so an ensemble is a
pure function of its :class:`SimConfig`, whatever the number of workers.

Samplers, per grid interval of length ``dt``:

* ``brownian``: ``N(0, sigma2 dt)`` increments, no jumps;
* ``poisson``: ``Poisson(rate dt)`` unit jumps at uniform times, drift ``-rate t``;
* ``cp-lognormal``: ``Poisson(dt)`` jumps of size ``exp(N(0, 1))``, drift ``-e**0.5 t``;
* ``gamma``: ``Gamma(shape=dt, scale=1)`` increments from numpy's
  ``standard_gamma`` (Marsaglia-Tsang rejection, with the power boost for
  shape < 1), drift ``-t``; no jump record;
* ``sum``: independent component paths added.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .harmonic import q_expand_in_x
from .kailath_segall import ks_evaluate_all
from .models import LevyModel
from .polycore import T

log = logging.getLogger(__name__)

BLOCK_SIZE = 4096
MIN_PATHS_FOR_VERDICT = 100


class UnsupportedModelError(ValueError):
    """The model cannot be used for the requested simulation task."""


@dataclass(frozen=True)
class SimConfig:
    model: LevyModel
    horizon: float = 1.0
    grid: tuple[float, ...] | None = None
    n_paths: int = 100_000
    seed: int = 0
    confidence_multiplier: float = 3.0
    workers: int = 1

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        grid = (float(self.horizon),) if self.grid is None else tuple(float(g) for g in self.grid)
        if not grid:
            raise ValueError("empty time grid")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("time grid must be strictly increasing")
        if grid[0] <= 0 or grid[-1] > self.horizon:
            raise ValueError(f"grid must lie in (0, {self.horizon}]")
        object.__setattr__(self, "grid", grid)
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class PathSample:
    """One path observed on the grid; ``jumps`` is an ``(k, 2)`` array of (time, size)."""

    times: np.ndarray
    values: np.ndarray
    jumps: np.ndarray | None


@dataclass
class PathEnsemble:
    """All simulated paths: ``values[i, g]`` is ``X`` of path ``i`` at ``grid[g]``.

    Jumps are stored flat, sorted by (path, time).  ``jump_path`` is ``None``
    when some component has no exact jump record (Gamma).
    """

    model: LevyModel
    grid: np.ndarray
    values: np.ndarray
    jump_path: np.ndarray | None
    jump_time: np.ndarray | None
    jump_size: np.ndarray | None
    sigma2: float
    seed: int
    _offsets: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]

    @property
    def has_jump_record(self) -> bool:
        return self.jump_path is not None

    def __len__(self) -> int:
        return self.n_paths

    def __getitem__(self, i: int) -> PathSample:
        return self.path(i)

    def __iter__(self) -> Iterator[PathSample]:
        return (self.path(i) for i in range(self.n_paths))

    def path(self, i: int) -> PathSample:
        if not -self.n_paths <= i < self.n_paths:
            raise IndexError(i)
        i %= self.n_paths
        jumps = None
        if self.has_jump_record:
            if self._offsets is None:
                self._offsets = np.searchsorted(self.jump_path, np.arange(self.n_paths + 1))
            lo, hi = self._offsets[i], self._offsets[i + 1]
            jumps = np.column_stack([self.jump_time[lo:hi], self.jump_size[lo:hi]])
        return PathSample(self.grid.copy(), self.values[i].copy(), jumps)

    def index_of(self, t: float) -> int:
        hits = np.flatnonzero(np.isclose(self.grid, t, rtol=0, atol=1e-12))
        if not hits.size:
            raise ValueError(f"time {t} is not on the simulation grid {self.grid.tolist()}")
        return int(hits[0])


@dataclass(frozen=True)
class PathVariations:
    """``data[k - 1, i, g]`` is the variation ``X^(k)`` of path ``i`` at ``grid[g]``."""

    grid: np.ndarray
    data: np.ndarray

    @property
    def max_n(self) -> int:
        return self.data.shape[0]

    def order(self, k: int) -> np.ndarray:
        if not 1 <= k <= self.max_n:
            raise ValueError(f"variation order {k} outside 1..{self.max_n}")
        return self.data[k - 1]


@dataclass(frozen=True)
class McVerdict:
    statistic: str
    estimate: float
    std_error: float
    target: float
    passed: bool
    n_paths: int
    multiplier: float = 3.0
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "estimate": self.estimate,
            "std_error": self.std_error,
            "target": self.target,
            "pass": self.passed,
            "n_paths": self.n_paths,
            "confidence_multiplier": self.multiplier,
            "degenerate": self.degenerate,
        }

    def __str__(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (
            f"[{flag}] {self.statistic}: {self.estimate:.6g} vs {self.target:.6g} "
            f"(SE {self.std_error:.3g}, {self.multiplier:g} SE gate, {self.n_paths} paths)"
        )


# -- sampling ---------------------------------------------------------------


def _leaves(model: LevyModel) -> list[LevyModel]:
    if model.sampler == "sum":
        return [leaf for c in model.components for leaf in _leaves(c)]
    if model.sampler is None:
        raise UnsupportedModelError(f"model {model.name!r} has no sampler")
    if model.sampler not in ("brownian", "poisson", "cp-lognormal", "gamma", "zero"):
        raise UnsupportedModelError(f"unknown sampler {model.sampler!r}")
    return [model]


def _uniform_jumps(rng, counts: np.ndarray, grid: np.ndarray):
    # counts: (m, G); returns flat (path, time) arrays for the jumps
    m, G = counts.shape
    flat = counts.ravel()
    total = int(flat.sum())
    cell = np.repeat(np.arange(m * G), flat)
    path = cell // G
    interval = cell % G
    starts = np.concatenate([[0.0], grid[:-1]])
    lo, hi = starts[interval], grid[interval]
    time = lo + (hi - lo) * (1.0 - rng.random(total))
    # keep every jump inside (lo, hi] so grid attribution is unambiguous
    time = np.clip(time, np.nextafter(lo, np.inf), hi)
    return path, time


def _sample_leaf(leaf: LevyModel, rng: np.random.Generator, m: int, grid: np.ndarray):
    G = grid.size
    dts = np.diff(grid, prepend=0.0)
    kind = leaf.sampler
    empty = (np.empty(0, np.int64), np.empty(0), np.empty(0))
    if kind == "zero":
        return np.zeros((m, G)), empty
    if kind == "brownian":
        sigma = math.sqrt(float(leaf.params[0]))
        inc = rng.standard_normal((m, G)) * (sigma * np.sqrt(dts))
        return np.cumsum(inc, axis=1), empty
    if kind == "gamma":
        inc = rng.standard_gamma(np.broadcast_to(dts, (m, G)))
        return np.cumsum(inc, axis=1) - grid, None
    if kind == "poisson":
        rate = float(leaf.params[0])
        counts = rng.poisson(rate * np.broadcast_to(dts, (m, G)))
        path, time = _uniform_jumps(rng, counts, grid)
        values = np.cumsum(counts, axis=1) - rate * grid
        return values, (path, time, np.ones(time.size))
    if kind == "cp-lognormal":
        counts = rng.poisson(np.broadcast_to(dts, (m, G)))
        path, time = _uniform_jumps(rng, counts, grid)
        size = np.exp(rng.standard_normal(time.size))
        interval = np.searchsorted(grid, time, side="left")
        sums = np.bincount(path * G + interval, weights=size, minlength=m * G).reshape(m, G)
        values = np.cumsum(sums, axis=1) - math.exp(0.5) * grid
        return values, (path, time, size)
    raise UnsupportedModelError(f"unknown sampler {kind!r}")


def _simulate_block(config: SimConfig, leaves: list[LevyModel], grid: np.ndarray, block: int):
    lo = block * BLOCK_SIZE
    m = min(BLOCK_SIZE, config.n_paths - lo)
    values = np.zeros((m, grid.size))
    parts = []
    recorded = True
    for c, leaf in enumerate(leaves):
        ss = np.random.SeedSequence(config.seed, spawn_key=(block, c))
        rng = np.random.Generator(np.random.Philox(ss))
        v, jumps = _sample_leaf(leaf, rng, m, grid)
        values += v
        if jumps is None:
            recorded = False
        elif recorded:
            parts.append(jumps)
    if not recorded:
        return values, None
    path = np.concatenate([p for p, _, _ in parts] + [np.empty(0, np.int64)]) + lo
    time = np.concatenate([t for _, t, _ in parts] + [np.empty(0)])
    size = np.concatenate([s for _, _, s in parts] + [np.empty(0)])
    return values, (path, time, size)


def simulate(config: SimConfig) -> PathEnsemble:
    """Simulate ``config.n_paths`` paths of ``config.model`` on ``config.grid``."""
    leaves = _leaves(config.model)
    grid = np.asarray(config.grid, dtype=float)
    n_blocks = -(-config.n_paths // BLOCK_SIZE)
    work = lambda b: _simulate_block(config, leaves, grid, b)  # noqa: E731
    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            results = list(pool.map(work, range(n_blocks)))
    else:
        results = [work(b) for b in range(n_blocks)]
    values = np.concatenate([v for v, _ in results], axis=0)
    if any(j is None for _, j in results):
        jp = jt = js = None
    else:
        jp = np.concatenate([j[0] for _, j in results])
        jt = np.concatenate([j[1] for _, j in results])
        js = np.concatenate([j[2] for _, j in results])
        order = np.lexsort((jt, jp))
        jp, jt, js = jp[order], jt[order], js[order]
    log.debug("simulated %d paths of %s (seed %d)", config.n_paths, config.model.name, config.seed)
    return PathEnsemble(
        model=config.model,
        grid=grid,
        values=values,
        jump_path=jp,
        jump_time=jt,
        jump_size=js,
        sigma2=float(config.model.sigma2),
        seed=config.seed,
    )


# -- variations and iterated integrals ------------------------------------------


def compute_variations(paths: PathEnsemble, max_n: int) -> PathVariations:
    """Variations ``X^(1)..X^(max_n)`` at every grid time.

    ``X^(2)`` includes the continuous part ``sigma2 * t``.  Models with an
    infinite-activity jump component (Gamma) are rejected.
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    if not paths.model.finite_activity or not paths.has_jump_record:
        raise UnsupportedModelError(
            f"model {paths.model.name!r} has infinitely many jumps; its variations "
            "cannot be computed from an exact jump record"
        )
    N, G = paths.values.shape
    data = np.zeros((max_n, N, G))
    data[0] = paths.values
    if max_n >= 2:
        interval = np.searchsorted(paths.grid, paths.jump_time, side="left")
        cell = paths.jump_path * G + interval
        power = paths.jump_size.copy()
        for k in range(2, max_n + 1):
            power = power * paths.jump_size
            sums = np.bincount(cell, weights=power, minlength=N * G).reshape(N, G)
            data[k - 1] = np.cumsum(sums, axis=1)
        data[1] += paths.sigma2 * paths.grid
    return PathVariations(paths.grid, data)


def compute_iterated_integrals(variations: PathVariations, max_n: int) -> np.ndarray:
    """``out[k, i, g] = P^(k)`` for ``k = 0..max_n``, via the Kailath-Segall recurrence."""
    if max_n > variations.max_n:
        raise ValueError(f"need variations up to order {max_n}, have {variations.max_n}")
    vs = [variations.order(k) for k in range(1, max_n + 1)]
    if max_n == 0:
        return np.ones((1,) + variations.data.shape[1:])
    return np.stack(ks_evaluate_all(vs, max_n))


# -- polynomial evaluation ---------------------------------------------------


def q_float_coeffs(model: LevyModel, n: int, t: float) -> np.ndarray:
    """Binary64 coefficients ``a_0(t)..a_n(t)`` of ``Q_n`` in powers of ``x``."""
    return np.array([float(a.evaluate({T: float(t)})) if a else 0.0 for a in q_expand_in_x(model, n)])


def evaluate_q(model: LevyModel, n: int, x, t: float, coeffs: np.ndarray | None = None):
    """``Q_n(x, t)`` by Horner's rule in ``x``."""
    if coeffs is None:
        coeffs = q_float_coeffs(model, n, t)
    x = np.asarray(x, dtype=float)
    acc = np.full_like(x, coeffs[-1])
    for a in coeffs[-2::-1]:
        acc = acc * x + a
    return acc


# -- verdicts -------------------------------------------------------------------


def make_verdict(name: str, samples: np.ndarray, target: float, multiplier: float) -> McVerdict:
    samples = np.asarray(samples, dtype=float).ravel()
    n = samples.size
    if n < 2:
        raise ValueError("at least two samples are needed for a standard error")
    est = float(np.mean(samples))
    se = float(np.std(samples, ddof=1) / math.sqrt(n))
    if se == 0.0:
        return McVerdict(name, est, se, target, est == target, n, multiplier, degenerate=True)
    passed = abs(est - target) <= multiplier * se
    return McVerdict(name, est, se, target, bool(passed), n, multiplier)


def _require_paths(config: SimConfig, paths: PathEnsemble | None) -> PathEnsemble:
    if config.n_paths < MIN_PATHS_FOR_VERDICT:
        raise ValueError(f"statistical verdicts need n_paths >= {MIN_PATHS_FOR_VERDICT}")
    if paths is None:
        paths = simulate(config)
    return paths


def mc_martingale_test(
    config: SimConfig, n: int, s: float, t: float, paths: PathEnsemble | None = None
) -> tuple[McVerdict, McVerdict]:
    """Check ``E[Q_n(X_t, t)] = 0`` and ``E[Q_n(X_t, t) - Q_n(X_s, s)] = 0``.

    Pass ``paths`` to reuse an ensemble simulated from the same ``config``.
    """
    if not s < t:
        raise ValueError("need s < t")
    coeffs_t = q_float_coeffs(config.model, n, t)
    coeffs_s = q_float_coeffs(config.model, n, s)
    paths = _require_paths(config, paths)
    xs = paths.values[:, paths.index_of(s)]
    xt = paths.values[:, paths.index_of(t)]
    qt = evaluate_q(config.model, n, xt, t, coeffs_t)
    qs = evaluate_q(config.model, n, xs, s, coeffs_s)
    k = config.confidence_multiplier
    name = config.model.name
    return (
        make_verdict(f"mean Q_{n}(X_t,t) [{name}, t={t:g}]", qt, 0.0, k),
        make_verdict(f"mean Q_{n}(X_t,t)-Q_{n}(X_s,s) [{name}, s={s:g}, t={t:g}]", qt - qs, 0.0, k),
    )


def mc_increment_correlation_test(
    config: SimConfig, n: int, s: float, t: float, paths: PathEnsemble | None = None
) -> McVerdict:
    """``E[Q_n(X_s, s) (Q_n(X_t, t) - Q_n(X_s, s))] = 0``: martingale increments are orthogonal to the past."""
    if not s < t:
        raise ValueError("need s < t")
    paths = _require_paths(config, paths)
    qs = evaluate_q(config.model, n, paths.values[:, paths.index_of(s)], s)
    qt = evaluate_q(config.model, n, paths.values[:, paths.index_of(t)], t)
    return make_verdict(
        f"mean Q_{n}(X_s,s)*dQ_{n} [{config.model.name}, s={s:g}, t={t:g}]",
        qs * (qt - qs),
        0.0,
        config.confidence_multiplier,
    )


def poisson_iterated_moment(n: int, m: int, t, rate=1, tol: float = 1e-17) -> float:
    """``E[P_t^(n) P_t^(m)]`` for a compensated Poisson process by direct enumeration.

    On ``{N_t = k}`` the variations are ``X_t = k - rate t`` and
    ``X^(j) = k`` (``j >= 2``), so the expectation is a Poisson-weighted sum
    over ``k``.  Past the mode the terms decay super-exponentially; the sum
    stops once a term is below ``tol`` times the running absolute sum.
    """
    t = Fraction(t)
    rate = Fraction(rate)
    lam = float(rate * t)
    if lam == 0:
        return float(n == 0 and m == 0)
    top = max(n, m)
    total = 0.0
    scale = 0.0
    k = 0
    while True:
        pmf = math.exp(-lam + k * math.log(lam) - math.lgamma(k + 1))
        vs = [Fraction(k) - rate * t] + [Fraction(k)] * max(top - 1, 0)
        ps = ks_evaluate_all(vs, top)
        term = pmf * float(ps[n] * ps[m])
        total += term
        scale += abs(term)
        if k > lam + 2 * top + 10 and abs(term) <= tol * scale:
            break
        k += 1
    return total


def orthogonality_target(model: LevyModel, n: int, m: int, t: float) -> float:
    if n != m:
        return 0.0
    if model.sampler == "brownian":
        sigma2 = float(model.params[0])
        return (sigma2 * t) ** n / math.factorial(n)
    if model.sampler == "poisson":
        return poisson_iterated_moment(n, n, t, model.params[0])
    raise UnsupportedModelError(
        f"no reference value for E[(P_t^({n}))^2] under {model.name!r}; "
        "only Brownian and compensated Poisson diagonals are available"
    )


def mc_orthogonality_test(
    config: SimConfig, n: int, m: int, t: float, paths: PathEnsemble | None = None
) -> McVerdict:
    """Compare the sample mean of ``P_t^(n) P_t^(m)`` with its reference value."""
    if n < 0 or m < 0:
        raise ValueError("orders must be non-negative")
    if not config.model.finite_activity:
        raise UnsupportedModelError(f"model {config.model.name!r} has no exact jump record")
    target = orthogonality_target(config.model, n, m, t)
    paths = _require_paths(config, paths)
    top = max(n, m, 1)
    var = compute_variations(paths, top)
    g = paths.index_of(t)
    P = compute_iterated_integrals(var, top)[:, :, g]
    return make_verdict(
        f"mean P^({n})P^({m}) [{config.model.name}, t={t:g}]",
        P[n] * P[m],
        target,
        config.confidence_multiplier,
    )
