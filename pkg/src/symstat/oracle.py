"""
Exact moments of U-statistics over finite sample spaces.

``T_n`` is a symmetric function of the sample, so it only depends on the
empirical count vector. Moments are therefore sums over the
``C(n + s - 1, s - 1)`` compositions of ``n`` into ``s`` parts, each weighted
by its multinomial probability, instead of over all ``s**n`` ordered samples.

Per-class contributions are computed chunk by chunk (optionally on a thread
pool), concatenated in class order and reduced with one ``np.sum`` call, so
the result does not depend on the number of workers.
"""
from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import (ATOL, FiniteDistribution, KernelTable, _check_alphabet,
                   _comb_table, _contract_tail)
from .errors import BudgetExceeded, KernelError

DEFAULT_CLASS_BUDGET = 50_000_000
CHUNK = 4096
LOG_WEIGHT_THRESHOLD = 50


def class_budget() -> int:
    """Enumeration budget; the ``USTAT_BUDGET`` environment variable overrides it."""
    env = os.environ.get("USTAT_BUDGET")
    if env:
        return int(float(env))
    return DEFAULT_CLASS_BUDGET


def num_count_classes(n: int, s: int) -> int:
    return math.comb(n + s - 1, s - 1)


def iter_compositions(n: int, s: int):
    """Count vectors summing to ``n`` over ``s`` letters (stars and bars order)."""
    for bars in itertools.combinations(range(n + s - 1), s - 1):
        prev = -1
        counts = []
        for b in bars:
            counts.append(b - prev - 1)
            prev = b
        counts.append(n + s - 2 - prev)
        yield tuple(counts)


def class_weights(counts: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """Multinomial probability of each count vector (rows of ``counts``)."""
    n = int(counts[0].sum()) if len(counts) else 0
    if n > LOG_WEIGHT_THRESHOLD:
        with np.errstate(divide="ignore"):
            logp = np.log(probs)
        terms = np.where(counts > 0, counts * logp[None, :], 0.0)
        logw = gammaln(n + 1) - gammaln(counts + 1).sum(axis=1) + terms.sum(axis=1)
        return np.exp(logw)
    out = np.empty(len(counts))
    for i, row in enumerate(counts):
        coef = math.factorial(n)
        for c in row:
            coef //= math.factorial(int(c))
        out[i] = coef * math.prod(float(q) ** int(c) for q, c in zip(probs, row))
    return out


def class_statistics(kernel: KernelTable, counts: np.ndarray) -> np.ndarray:
    """``T_n`` for each count vector, via multiset multiplicities."""
    n = int(counts[0].sum())
    combs = _comb_table(n, kernel.order)
    kc = kernel.key_counts
    # (classes, multisets, letters) -> product over letters
    mult = np.prod(combs[counts[:, None, :], kc[None, :, :]], axis=2)
    return np.sum(mult * kernel.values_array[None, :], axis=1)


@dataclass(frozen=True)
class CountClass:
    counts: tuple[int, ...]
    weight: float
    t_value: float


def count_classes(kernel: KernelTable, dist: FiniteDistribution, n: int) -> list[CountClass]:
    """Every count class with its weight and statistic (small cases only)."""
    counts = np.array(list(iter_compositions(n, dist.size)), dtype=np.int64)
    w = class_weights(counts, dist.p)
    t = class_statistics(kernel, counts)
    return [CountClass(tuple(int(c) for c in row), float(wi), float(ti))
            for row, wi, ti in zip(counts, w, t)]


@dataclass(frozen=True)
class ExactMomentResult:
    value: float
    n: int
    m: int
    p: float
    absolute: bool
    num_classes: int
    elapsed: float
    provenance: str = "exact"

    def to_dict(self) -> dict:
        return {"value": self.value, "n": self.n, "m": self.m, "p": self.p,
                "absolute": self.absolute, "num_classes": self.num_classes,
                "elapsed": self.elapsed, "provenance": self.provenance}


def _is_integer(p: float) -> bool:
    return float(p).is_integer()


def _chunk_contrib(kernel, probs, s, n, bars_chunk, p, absolute):
    counts = np.empty((len(bars_chunk), s), dtype=np.int64)
    for i, bars in enumerate(bars_chunk):
        prev = -1
        for j, b in enumerate(bars):
            counts[i, j] = b - prev - 1
            prev = b
        counts[i, s - 1] = n + s - 2 - prev
    w = class_weights(counts, probs)
    t = class_statistics(kernel, counts)
    if absolute:
        powered = np.abs(t) ** p
    else:
        powered = t ** int(p)
    return w * powered


def exact_Tn_moment(kernel: KernelTable, dist: FiniteDistribution, n: int, p: float,
                    absolute: bool = True, *, budget: int | None = None,
                    workers: int = 1) -> ExactMomentResult:
    """Exact ``E|T_n|^p`` (or ``E T_n^p`` for integer ``p`` with ``absolute=False``).

    Parameters
    ----------
    kernel, dist
        Kernel table and the law of each observation.
    n
        Sample size, at least the kernel order.
    p
        Moment order, ``p >= 1``.
    absolute
        Take ``|T_n|`` before powering. Signed moments need integer ``p``.
    budget
        Maximum number of count classes; defaults to :func:`class_budget`.
    workers
        Thread count. Results are bit-identical for any value.
    """
    _check_alphabet(kernel, dist)
    m, s = kernel.order, dist.size
    if n < m:
        raise KernelError(f"n={n} is smaller than kernel order m={m}")
    if p < 1:
        raise KernelError(f"p must be >= 1, got {p}")
    if not absolute and not _is_integer(p):
        raise KernelError("signed moments are only defined for integer p")
    limit = class_budget() if budget is None else budget
    total = num_count_classes(n, s)
    if total > limit:
        raise BudgetExceeded(f"{total} count classes exceed the budget of {limit}; "
                             "use the Monte Carlo estimator (symstat mc) instead")
    start = time.perf_counter()
    bars = itertools.combinations(range(n + s - 1), s - 1)
    chunks = []
    while True:
        block = list(itertools.islice(bars, CHUNK))
        if not block:
            break
        chunks.append(block)
    probs = dist.p
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                lambda b: _chunk_contrib(kernel, probs, s, n, b, p, absolute), chunks))
    else:
        parts = [_chunk_contrib(kernel, probs, s, n, b, p, absolute) for b in chunks]
    value = float(np.sum(np.concatenate(parts)))
    return ExactMomentResult(value, n, m, float(p), absolute, total,
                             time.perf_counter() - start)


def cond_moment(kernel: KernelTable, dist: FiniteDistribution, k: int,
                inner: str = "identity", r: float = 1.0) -> float:
    """Exact ``E[(E[h(Y) | X_1..X_k])^r]`` with ``h`` the identity or the square.

    ``k = 0`` gives ``(E h(Y))^r``; ``k = m`` gives ``E h(Y)^r``. A negative
    conditional mean is only allowed with integer ``r`` (signed power).
    """
    _check_alphabet(kernel, dist)
    m = kernel.order
    if not (0 <= k <= m):
        raise KernelError(f"need 0 <= k <= m, got k={k}, m={m}")
    if r < 1:
        raise KernelError(f"r must be >= 1, got {r}")
    if inner == "identity":
        h = kernel.tensor
    elif inner == "square":
        h = kernel.tensor ** 2
    else:
        raise KernelError(f"inner must be 'identity' or 'square', got {inner!r}")
    cond = _contract_tail(h, dist.p, k)
    if np.any(cond < 0):
        if inner == "identity" and not kernel.is_nonnegative() and not _is_integer(r):
            raise KernelError("non-integer power of a signed conditional mean; "
                              "this functional needs a nonnegative kernel")
        powered = cond ** int(r) if _is_integer(r) else np.abs(cond) ** r
    else:
        powered = cond ** r
    return float(_contract_tail(np.asarray(powered, dtype=float), dist.p, 0))


def exact_sumsq_moment(kernel: KernelTable, dist: FiniteDistribution, n: int, p: float,
                       **kwargs) -> float:
    """``E(sum_{i_1 < ... < i_m} Y^2)^(p/2)``: the ``p/2`` moment of the U-statistic of ``Y^2``."""
    if p < 2:
        raise KernelError(f"p must be >= 2, got {p}")
    return exact_Tn_moment(kernel.squared(), dist, n, p / 2, absolute=True, **kwargs).value


def mc_crosscheck(exact: ExactMomentResult | float, mc) -> float:
    """``|exact - mc.mean| / mc.stderr``."""
    value = exact.value if isinstance(exact, ExactMomentResult) else float(exact)
    gap = abs(value - mc.mean)
    if mc.stderr == 0:
        if gap <= ATOL * max(1.0, abs(value)):
            return 0.0
        raise KernelError(f"zero standard error but estimate {mc.mean!r} differs "
                          f"from exact value {value!r}")
    return gap / mc.stderr
