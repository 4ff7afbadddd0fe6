"""
Finite sample spaces and symmetric kernels.

Kernels of order ``m`` over an alphabet of size ``s`` are stored on sorted
index multisets, so permutation symmetry holds by construction. Everything
here is exact summation over the finite space; there is no sampling.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import KernelError, NotDegenerateError

ATOL = 1e-12

KERNEL_KINDS = ("table", "product", "sum_power", "constant", "remark_exponential")


@dataclass(frozen=True)
class FiniteDistribution:
    """Probability mass function on a finite set of real points."""

    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        probs = tuple(float(q) for q in self.probs)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)
        if len(values) == 0:
            raise KernelError("distribution needs at least one point")
        if len(values) != len(probs):
            raise KernelError(
                f"values has {len(values)} points but probs has {len(probs)}"
            )
        if len(set(values)) != len(values):
            raise KernelError("distribution values must be distinct")
        if any(q < 0.0 or q > 1.0 or not math.isfinite(q) for q in probs):
            raise KernelError("probabilities must lie in [0, 1]")
        if abs(math.fsum(probs) - 1.0) > ATOL:
            raise KernelError(f"probabilities sum to {math.fsum(probs)!r}, not 1")

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def p(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    @property
    def x(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def index_of(self, value: float) -> int:
        try:
            return self.values.index(float(value))
        except ValueError:
            raise KernelError(f"{value!r} is not in the alphabet") from None

    def to_dict(self) -> dict:
        return {"values": list(self.values), "probs": list(self.probs)}


def rademacher() -> FiniteDistribution:
    return FiniteDistribution((-1.0, 1.0), (0.5, 0.5))


def bernoulli(q: float = 0.5) -> FiniteDistribution:
    return FiniteDistribution((0.0, 1.0), (1.0 - q, q))


def multisets(s: int, m: int):
    """Sorted index tuples of size ``m`` over ``range(s)``, in lexicographic order."""
    return itertools.combinations_with_replacement(range(s), m)


def multiset_counts(key: Sequence[int], s: int) -> tuple[int, ...]:
    counts = [0] * s
    for i in key:
        counts[i] += 1
    return tuple(counts)


@dataclass(frozen=True)
class KernelTable:
    """A symmetric kernel of order ``m`` tabulated on sorted index multisets.

    ``entries`` maps every sorted ``m``-tuple over ``range(alphabet_size)`` to
    the kernel value. Evaluation at an unsorted tuple sorts it first, so the
    table is its own symmetrization.
    """

    order: int
    alphabet_size: int
    entries: Mapping[tuple[int, ...], float]

    def __post_init__(self):
        if self.order < 1:
            raise KernelError(f"kernel order must be >= 1, got {self.order}")
        if self.alphabet_size < 1:
            raise KernelError("alphabet size must be >= 1")
        clean = {}
        for key, value in self.entries.items():
            skey = tuple(sorted(int(i) for i in key))
            if len(skey) != self.order:
                raise KernelError(f"entry {key} has wrong arity for order {self.order}")
            if any(i < 0 or i >= self.alphabet_size for i in skey):
                raise KernelError(f"entry {key} indexes outside the alphabet")
            if skey in clean:
                raise KernelError(f"duplicate entry for multiset {skey}")
            clean[skey] = float(value)
        for key in multisets(self.alphabet_size, self.order):
            if key not in clean:
                label = ",".join(map(str, key))
                raise KernelError(f"entries[{label}] missing")
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    def __call__(self, *idx: int) -> float:
        return self.entries[tuple(sorted(idx))]

    @cached_property
    def keys(self) -> list[tuple[int, ...]]:
        return list(self.entries)

    @cached_property
    def values_array(self) -> np.ndarray:
        return np.array([self.entries[k] for k in self.keys], dtype=float)

    @cached_property
    def key_counts(self) -> np.ndarray:
        """(num_multisets, s) matrix of per-letter multiplicities."""
        return np.array([multiset_counts(k, self.alphabet_size) for k in self.keys],
                        dtype=np.int64).reshape(len(self.keys), self.alphabet_size)

    @cached_property
    def tensor(self) -> np.ndarray:
        """Dense array of shape ``(s,) * m`` holding the kernel on ordered tuples."""
        out = np.empty((self.alphabet_size,) * self.order, dtype=float)
        for idx in itertools.product(range(self.alphabet_size), repeat=self.order):
            out[idx] = self.entries[tuple(sorted(idx))]
        return out

    def map(self, fn: Callable[[float], float]) -> "KernelTable":
        return KernelTable(self.order, self.alphabet_size,
                           {k: fn(v) for k, v in self.entries.items()})

    def squared(self) -> "KernelTable":
        return self.map(lambda v: v * v)

    def is_nonnegative(self) -> bool:
        return all(v >= 0.0 for v in self.entries.values())

    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.entries.values())

    @classmethod
    def from_function(cls, fn: Callable[..., float], m: int,
                      dist: FiniteDistribution) -> "KernelTable":
        """Tabulate ``fn`` on sorted multisets of alphabet *values*.

        Only the sorted representative is evaluated, so an asymmetric ``fn``
        is silently symmetrized by this choice; use :func:`check_symmetry`
        first if that matters.
        """
        xs = dist.values
        return cls(m, dist.size,
                   {key: float(fn(*(xs[i] for i in key))) for key in multisets(dist.size, m)})


@dataclass(frozen=True)
class KernelSpec:
    """Declarative kernel description, the payload of a kernel JSON file."""

    kind: str
    m: int
    dist: FiniteDistribution | None = None
    entries: Mapping[tuple[int, ...], float] | None = None
    r: float | None = None
    c: float | None = None
    k: int | None = None
    p: float | None = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise KernelError(f"unknown kernel kind {self.kind!r}")
        if not isinstance(self.m, int) or isinstance(self.m, bool) or self.m < 1:
            raise KernelError(f"m must be a positive integer, got {self.m!r}")
        if self.kind == "remark_exponential":
            if self.k is None or not (0 <= self.k <= self.m):
                raise KernelError("remark_exponential needs 0 <= k <= m")
            if self.p is None or not self.p > 2:
                raise KernelError("remark_exponential needs p > 2")
            return
        if self.dist is None:
            raise KernelError(f"kind {self.kind!r} needs a distribution")
        if self.kind == "table" and self.entries is None:
            raise KernelError("table kernel needs entries")
        if self.kind == "sum_power" and self.r is None:
            raise KernelError("sum_power kernel needs r")
        if self.kind == "constant" and self.c is None:
            raise KernelError("constant kernel needs c")

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind, "m": self.m}
        if self.dist is not None:
            out["dist"] = self.dist.to_dict()
        if self.entries is not None:
            out["entries"] = {",".join(map(str, k)): v for k, v in self.entries.items()}
        for name in ("r", "c", "k", "p"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out


def build_kernel(spec: KernelSpec, dist: FiniteDistribution | None = None) -> KernelTable:
    """Tabulate a :class:`KernelSpec` over a finite alphabet.

    ``dist`` defaults to ``spec.dist``; if both are given their alphabets
    must agree.
    """
    if spec.kind == "remark_exponential":
        raise KernelError("remark_exponential lives on a continuous space; "
                          "use symstat.experiments.remark_kernel")
    if dist is None:
        dist = spec.dist
    elif spec.dist is not None and spec.dist.values != dist.values:
        raise KernelError("kernel spec alphabet does not match the distribution")
    m = spec.m
    if spec.kind == "constant":
        c = float(spec.c)
        return KernelTable(m, dist.size, {key: c for key in multisets(dist.size, m)})
    if spec.kind == "product":
        return KernelTable.from_function(lambda *xs: math.prod(xs), m, dist)
    if spec.kind == "sum_power":
        r = float(spec.r)
        return KernelTable.from_function(lambda *xs: math.fsum(xs) ** r, m, dist)
    return KernelTable(m, dist.size, spec.entries)


def check_symmetry(fn: Callable[..., float], m: int, s: int) -> float:
    """Largest ``|fn(x) - fn(pi x)|`` over ordered ``m``-tuples of ``range(s)``.

    ``fn`` takes alphabet indices. Within one permutation orbit the largest
    pairwise gap is ``max - min``, so each orbit is visited once.
    """
    worst = 0.0
    for rep in multisets(s, m):
        vals = [fn(*perm) for perm in set(itertools.permutations(rep))]
        worst = max(worst, max(vals) - min(vals))
    return float(worst)


def _contract_tail(tensor: np.ndarray, probs: np.ndarray, keep: int) -> np.ndarray:
    """Integrate out all but the first ``keep`` axes against ``probs``."""
    out = tensor
    for _ in range(tensor.ndim - keep):
        out = out @ probs
    return out


def _contract_all(tensor: np.ndarray, probs: np.ndarray) -> float:
    return float(_contract_tail(tensor, probs, 0))


def _check_alphabet(kernel: KernelTable, dist: FiniteDistribution):
    if kernel.alphabet_size != dist.size:
        raise KernelError(f"kernel alphabet size {kernel.alphabet_size} does not "
                          f"match distribution size {dist.size}")


def kernel_abs_moment(kernel: KernelTable, dist: FiniteDistribution, p: float) -> float:
    """Exact ``E|Y(X_1, ..., X_m)|^p``."""
    if p < 1:
        raise KernelError(f"p must be >= 1, got {p}")
    _check_alphabet(kernel, dist)
    return _contract_all(np.abs(kernel.tensor) ** p, dist.p)


def kernel_mean(kernel: KernelTable, dist: FiniteDistribution) -> float:
    _check_alphabet(kernel, dist)
    return _contract_all(kernel.tensor, dist.p)


def check_degeneracy(kernel: KernelTable, dist: FiniteDistribution) -> float:
    """Largest ``|E(Y | X_1..X_{m-1} = x)|`` over ordered ``(m-1)``-tuples ``x``.

    A value below ``1e-12`` certifies the kernel is canonical under ``dist``.
    """
    _check_alphabet(kernel, dist)
    cond = kernel.tensor @ dist.p
    return float(np.max(np.abs(cond)))


@dataclass(frozen=True)
class ProjectionSet:
    """Hoeffding components ``g_0, ..., g_m`` of a kernel under one law.

    ``components[0]`` is the scalar mean; ``components[k]`` for ``k >= 1`` is
    a :class:`KernelTable` of order ``k``.
    """

    components: tuple
    base: KernelTable
    dist: FiniteDistribution

    @property
    def order(self) -> int:
        return self.base.order

    def reconstruct(self) -> np.ndarray:
        """Sum of all components over all index subsets, on ordered tuples."""
        m, s = self.base.order, self.base.alphabet_size
        total = np.full((s,) * m, float(self.components[0]))
        for k in range(1, m + 1):
            g = self.components[k].tensor
            for subset in itertools.combinations(range(m), k):
                shape = [1] * m
                for axis in subset:
                    shape[axis] = s
                total = total + g.reshape(shape)
        return total

    def reconstruction_residual(self) -> float:
        return float(np.max(np.abs(self.reconstruct() - self.base.tensor)))

    def degeneracy_residuals(self) -> list[float]:
        return [check_degeneracy(self.components[k], self.dist)
                for k in range(1, self.order + 1)]


def _table_from_tensor(tensor: np.ndarray) -> KernelTable:
    k, s = tensor.ndim, tensor.shape[0]
    return KernelTable(k, s, {key: float(tensor[key]) for key in multisets(s, k)})


def hoeffding_project(kernel: KernelTable, dist: FiniteDistribution) -> ProjectionSet:
    """Hoeffding decomposition by inclusion-exclusion over conditioning sets.

    ``g_k(x_1..x_k) = sum_{J subset of {1..k}} (-1)^(k-|J|) E(Y | X_J = x_J)``.
    Because ``Y`` is symmetric, ``E(Y | X_J)`` depends only on ``|J|`` and is
    obtained by integrating out the trailing axes of the dense tensor.
    """
    _check_alphabet(kernel, dist)
    m, s = kernel.order, kernel.alphabet_size
    cond = [_contract_tail(kernel.tensor, dist.p, j) for j in range(m + 1)]
    components: list = [float(cond[0])]
    for k in range(1, m + 1):
        g = np.zeros((s,) * k)
        for j in range(k + 1):
            sign = (-1) ** (k - j)
            for subset in itertools.combinations(range(k), j):
                shape = [1] * k
                for axis in subset:
                    shape[axis] = s
                g = g + sign * np.reshape(cond[j], shape)
        components.append(_table_from_tensor(np.broadcast_to(g, (s,) * k)))
    return ProjectionSet(tuple(components), kernel, dist)


def _comb_table(n: int, m: int) -> np.ndarray:
    """``C(c, k)`` as floats for ``0 <= c <= n``, ``0 <= k <= m``."""
    return np.array([[math.comb(c, k) for k in range(m + 1)] for c in range(n + 1)],
                    dtype=float)


def evaluate_U(kernel: KernelTable, sample: Sequence[int]) -> float:
    """``T_n`` on a sample of alphabet indices.

    Uses the sample's count vector: the multiset ``kappa`` appears in
    ``prod_j C(c_j, kappa_j)`` of the ``C(n, m)`` index subsets.
    """
    n, m = len(sample), kernel.order
    if n < m:
        raise KernelError(f"sample size {n} is smaller than kernel order {m}")
    counts = np.array(multiset_counts(sample, kernel.alphabet_size))
    combs = _comb_table(n, m)
    kc = kernel.key_counts
    mult = np.prod(combs[counts[None, :], kc], axis=1)
    return float(np.sum(mult * kernel.values_array))


def martingale_term(kernel: KernelTable, dist: FiniteDistribution, n: int,
                    i_m: int) -> float:
    """Residual of the martingale-difference property at level ``i_m``.

    Forms ``Y_{i_m} = sum_{i_1 < ... < i_{m-1} < i_m} Y(X_{i_1}, ..., X_{i_m})``
    and returns ``max |E(Y_{i_m} | X_1..X_{i_m - 1})|`` over all assignments
    of the first ``i_m - 1`` coordinates.
    """
    _check_alphabet(kernel, dist)
    m, s = kernel.order, kernel.alphabet_size
    if not (m <= i_m <= n):
        raise KernelError(f"need m <= i_m <= n, got m={m}, i_m={i_m}, n={n}")
    resid = check_degeneracy(kernel, dist)
    if resid > ATOL:
        raise NotDegenerateError(resid)
    heads = list(itertools.combinations(range(i_m - 1), m - 1))
    probs = dist.p
    worst = 0.0
    for past in itertools.product(range(s), repeat=i_m - 1):
        cond = 0.0
        for j in range(s):
            y = math.fsum(kernel(*(past[i] for i in head), j) for head in heads)
            cond += probs[j] * y
        worst = max(worst, abs(cond))
    return worst


# -- reference corpus ---------------------------------------------------------

def _corpus_specs() -> dict[str, KernelSpec]:
    b = bernoulli(0.5)
    return {
        "constant": KernelSpec("constant", 2, dist=b, c=1.0),
        "rademacher_product": KernelSpec("product", 2, dist=rademacher()),
        "bernoulli_product": KernelSpec("product", 2, dist=b),
        "centered_bernoulli_g2": KernelSpec(
            "table", 2, dist=b,
            entries={(0, 0): 0.25, (0, 1): -0.25, (1, 1): 0.25}),
        "sum_power": KernelSpec(
            "sum_power", 2,
            dist=FiniteDistribution((0.0, 1.0, 2.0), (0.2, 0.5, 0.3)), r=2.0),
    }


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    kernel: KernelTable
    dist: FiniteDistribution
    spec: KernelSpec = field(repr=False)

    @property
    def nonnegative(self) -> bool:
        return self.kernel.is_nonnegative()

    @property
    def degenerate(self) -> bool:
        return check_degeneracy(self.kernel, self.dist) <= ATOL


def corpus() -> list[CorpusEntry]:
    """The reference kernels used throughout the test and acceptance suites."""
    out = []
    for name, spec in _corpus_specs().items():
        out.append(CorpusEntry(name, build_kernel(spec), spec.dist, spec))
    return out


def corpus_entry(name: str) -> CorpusEntry:
    for entry in corpus():
        if entry.name == name:
            return entry
    raise KeyError(name)
