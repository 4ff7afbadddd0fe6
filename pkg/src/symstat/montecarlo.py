"""
Monte Carlo moment estimates with reproducible, layout-independent streams.

Samples are produced in fixed-size chunks. Chunk ``i`` draws from a Philox
generator keyed by ``SeedSequence(seed, spawn_key=(i,))``, and per-chunk
running moments are merged in chunk order, so the estimate depends on
``(seed, chunk_size, parameters)`` only and never on the worker count.
"""
from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import FiniteDistribution, KernelTable
from .errors import BudgetExceeded, KernelError, NumericalOverflow

DEFAULT_EVAL_BUDGET = 100_000_000
DEFAULT_CHUNK = 10_000

NESTED_BIAS_NOTE = ("nested estimate: (inner mean)^r is biased for r > 1, "
                    "leading bias of order 1/n_inner")


@dataclass(frozen=True)
class Sampler:
    """I.i.d. draws from a finite law or from the exponential law with rate 1."""

    kind: str
    dist: FiniteDistribution | None = None

    def __post_init__(self):
        if self.kind not in ("finite", "exponential"):
            raise KernelError(f"unknown sampler kind {self.kind!r}")
        if self.kind == "finite" and self.dist is None:
            raise KernelError("finite sampler needs a distribution")

    @classmethod
    def finite(cls, dist: FiniteDistribution) -> "Sampler":
        return cls("finite", dist)

    @classmethod
    def exponential(cls) -> "Sampler":
        return cls("exponential")

    def draw_indices(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.kind != "finite":
            raise KernelError("only finite samplers index an alphabet")
        return rng.choice(self.dist.size, size=shape, p=self.dist.p)

    def draw(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.kind == "exponential":
            return rng.exponential(1.0, size=shape)
        return self.dist.x[self.draw_indices(rng, shape)]

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.dist is not None:
            out["dist"] = self.dist.to_dict()
        return out


class TableEvaluator:
    """Vectorized view of a :class:`KernelTable` as a function of alphabet values."""

    def __init__(self, kernel: KernelTable, dist: FiniteDistribution):
        if kernel.alphabet_size != dist.size:
            raise KernelError("kernel and distribution alphabets differ")
        self.order = kernel.order
        self._tensor = kernel.tensor
        self._order_idx = np.argsort(dist.x)
        self._sorted = dist.x[self._order_idx]

    def _index(self, x):
        return self._order_idx[np.searchsorted(self._sorted, x)]

    def __call__(self, *xs):
        return self._tensor[tuple(self._index(x) for x in xs)]


class ProductEvaluator:
    """Kernel ``prod_i f(x_i)``; ``T_n`` is then an elementary symmetric polynomial."""

    def __init__(self, factor: Callable[[np.ndarray], np.ndarray], order: int):
        self.factor = factor
        self.order = order

    def __call__(self, *xs):
        out = self.factor(xs[0])
        for x in xs[1:]:
            out = out * self.factor(x)
        return out


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_samples: int
    seed: int
    elapsed: float
    chunk_size: int = DEFAULT_CHUNK
    note: str | None = None

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "n_samples": self.n_samples,
                "seed": self.seed, "seed_hex": hex(self.seed), "chunk_size": self.chunk_size,
                "elapsed": self.elapsed, "note": self.note, "provenance": "monte_carlo"}


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _order(evaluator, m: int | None) -> int:
    if m is not None:
        return m
    try:
        return int(evaluator.order)
    except AttributeError:
        raise KernelError("evaluator has no .order attribute; pass m explicitly") from None


def u_statistic_rows(evaluator, x: np.ndarray, m: int) -> np.ndarray:
    """``T_n`` for every row of an ``(N, n)`` sample matrix."""
    n = x.shape[1]
    if isinstance(evaluator, ProductEvaluator):
        f = evaluator.factor(x)
        e = [np.ones(x.shape[0])] + [np.zeros(x.shape[0]) for _ in range(m)]
        for j in range(n):
            for r in range(min(j + 1, m), 0, -1):
                e[r] = e[r] + e[r - 1] * f[:, j]
        return e[m]
    total = np.zeros(x.shape[0])
    for combo in itertools.combinations(range(n), m):
        total = total + evaluator(*(x[:, i] for i in combo))
    return total


def _summarize(values: np.ndarray) -> tuple[int, float, float]:
    if not np.all(np.isfinite(values)):
        bad = int(np.sum(~np.isfinite(values)))
        raise NumericalOverflow(f"{bad} simulated values overflowed; reduce p or n, "
                                "or rescale the kernel")
    mean = float(np.mean(values))
    return len(values), mean, float(np.sum((values - mean) ** 2))


def _merge(parts) -> tuple[int, float, float]:
    """Chan et al. pairwise update, applied left to right in chunk order."""
    count, mean, m2 = 0, 0.0, 0.0
    for c, mu, s2 in parts:
        if count == 0:
            count, mean, m2 = c, mu, s2
            continue
        total = count + c
        delta = mu - mean
        mean = mean + delta * c / total
        m2 = m2 + s2 + delta * delta * count * c / total
        count = total
    return count, mean, m2


def _run_chunks(job, n_items: int, chunk_size: int, workers: int):
    sizes = [min(chunk_size, n_items - start) for start in range(0, n_items, chunk_size)]
    tasks = list(enumerate(sizes))
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda t: job(*t), tasks))
    return [job(*t) for t in tasks]


def _power(values: np.ndarray, p: float, absolute: bool) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        if absolute:
            return np.abs(values) ** p
        return values ** int(p)


def _estimate(parts, seed, start, chunk_size, note=None) -> McEstimate:
    count, mean, m2 = _merge(parts)
    if count < 2:
        raise KernelError("need at least two samples for a standard error")
    std = math.sqrt(m2 / (count - 1))
    return McEstimate(mean, std / math.sqrt(count), count, int(seed),
                      time.perf_counter() - start, chunk_size, note)


def mc_Tn_moment(evaluator, sampler: Sampler, n: int, p: float, absolute: bool = True,
                 n_samples: int = 100_000, seed: int = 0, *, m: int | None = None,
                 workers: int = 1, chunk_size: int = DEFAULT_CHUNK,
                 budget: int = DEFAULT_EVAL_BUDGET) -> McEstimate:
    """Estimate ``E|T_n|^p`` by simulating whole samples of size ``n``.

    ``evaluator`` is a vectorized symmetric function of ``m`` arrays.
    Factorized kernels (:class:`ProductEvaluator`) are summed with the
    elementary-symmetric recursion instead of iterating subsets.
    """
    m = _order(evaluator, m)
    if n < m:
        raise KernelError(f"n={n} is smaller than kernel order m={m}")
    if not absolute and not float(p).is_integer():
        raise KernelError("signed moments are only defined for integer p")
    if n_samples < 2:
        raise KernelError("n_samples must be at least 2")
    cost = math.comb(n, m) * m * n_samples
    if cost > budget:
        raise BudgetExceeded(f"{cost} kernel evaluations exceed the budget of {budget}")
    start = time.perf_counter()

    def job(index, size):
        rng = chunk_rng(seed, index)
        x = sampler.draw(rng, (size, n))
        return _summarize(_power(u_statistic_rows(evaluator, x, m), p, absolute))

    parts = _run_chunks(job, n_samples, chunk_size, workers)
    return _estimate(parts, seed, start, chunk_size)


def mc_cond_moment(evaluator, sampler: Sampler, k: int, inner: str = "identity",
                   r: float = 1.0, n_outer: int = 10_000, n_inner: int = 100,
                   seed: int = 0, *, m: int | None = None, workers: int = 1,
                   chunk_size: int = 1_000,
                   budget: int = DEFAULT_EVAL_BUDGET) -> McEstimate:
    """Nested estimate of ``E[(E[h(Y) | X_1..X_k])^r]``.

    Each outer draw fixes ``X_1..X_k``; ``n_inner`` fresh draws of the
    remaining coordinates estimate the conditional mean, which is then
    raised to ``r``. The estimate carries :data:`NESTED_BIAS_NOTE`.
    """
    m = _order(evaluator, m)
    if not (0 <= k <= m):
        raise KernelError(f"need 0 <= k <= m, got k={k}, m={m}")
    if inner not in ("identity", "square"):
        raise KernelError(f"inner must be 'identity' or 'square', got {inner!r}")
    if n_inner < 2:
        raise KernelError("n_inner must be at least 2")
    if k == m:
        n_inner = 1
    cost = n_outer * n_inner
    if cost > budget:
        raise BudgetExceeded(f"{cost} kernel evaluations exceed the budget of {budget}")
    integer_r = float(r).is_integer()
    start = time.perf_counter()

    def job(index, size):
        rng = chunk_rng(seed, index)
        head = sampler.draw(rng, (size, 1, k))
        tail = sampler.draw(rng, (size, n_inner, m - k))
        args = [np.broadcast_to(head[:, :, i], (size, n_inner)) for i in range(k)]
        args += [tail[:, :, i] for i in range(m - k)]
        y = np.asarray(evaluator(*args), dtype=float)
        h = y * y if inner == "square" else y
        c = h.mean(axis=1)
        with np.errstate(over="ignore", invalid="ignore"):
            v = c ** int(r) if integer_r else np.abs(c) ** r
        return _summarize(v)

    parts = _run_chunks(job, n_outer, chunk_size, workers)
    note = NESTED_BIAS_NOTE if k < m else None
    return _estimate(parts, seed, start, chunk_size, note)
