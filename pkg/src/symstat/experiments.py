"""
Growth-order study for the exponential counterexample kernel, and empirical
envelopes for the unspecified constants of the moment bounds.

The counterexample kernel over exponential(1) inputs is the symmetrization

    Y(x) = k! (m-k)! * sum_{|S| = k} prod_{i in S} u(x_i) prod_{i not in S} v(x_i)

with ``u(x) = exp(a x) - 1/(1-a)`` and ``v(x) = exp(-a x) - 1/(1+a)``. The
same function is produced by expanding every permutation of
``exp(a sum_{i<=k} x_i - a sum_{i>k} x_i)`` and subtracting conditional means
by inclusion-exclusion (:func:`remark_expansion`); each integrated-out
coordinate contributes ``1/(1 - a sign(k + 1/2 - j))``. Both forms are kept
and cross-checked. A Monte Carlo degeneracy probe decides whether a reading
of the kernel is accepted.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate

from .bounds import (BoundReport, log_slope, verify_theorem1, verify_theorem2,
                     verify_theorem3)
from .core import ATOL, CorpusEntry, check_degeneracy
from .errors import DegenerateZeroKernel, KernelError, NotDegenerateError
from .montecarlo import Sampler, chunk_rng, mc_cond_moment

READINGS = ("exponential", "printed")
A_RULES = ("complement", "printed")
QUAD_RTOL = 1e-10
PROBE_Z = 4.0


@dataclass(frozen=True)
class RemarkKernelParams:
    """Parameters of the counterexample kernel.

    ``a_rule="complement"`` sets ``a = (1 - n^(-p/2)) / p``, so that
    ``E exp(p a X) = n^(p/2)``; ``a_rule="printed"`` sets ``a = n^(-p/2) / p``.
    An explicit ``a`` overrides both.
    """

    m: int
    k: int
    p: float
    n: int
    a_rule: str = "complement"
    reading: str = "exponential"
    a_value: float | None = None

    def __post_init__(self):
        if self.m < 1:
            raise KernelError(f"m must be >= 1, got {self.m}")
        if not (0 <= self.k <= self.m):
            raise KernelError(f"need 0 <= k <= m, got k={self.k}, m={self.m}")
        if not self.p > 2:
            raise KernelError(f"p must exceed 2, got {self.p}")
        if self.n < 1:
            raise KernelError(f"n must be positive, got {self.n}")
        if self.a_rule not in A_RULES:
            raise KernelError(f"a_rule must be one of {A_RULES}")
        if self.reading not in READINGS:
            raise KernelError(f"reading must be one of {READINGS}")
        if not (0 < self.a < 1):
            raise KernelError(f"a = {self.a!r} must lie in (0, 1) for exp(1) moments to exist")

    @property
    def a(self) -> float:
        if self.a_value is not None:
            return float(self.a_value)
        if self.a_rule == "printed":
            return self.n ** (-self.p / 2) / self.p
        return (1.0 - self.n ** (-self.p / 2)) / self.p

    def with_n(self, n: int) -> "RemarkKernelParams":
        return RemarkKernelParams(self.m, self.k, self.p, n, self.a_rule, self.reading,
                                  self.a_value)

    def to_dict(self) -> dict:
        return {"m": self.m, "k": self.k, "p": self.p, "n": self.n, "a": self.a,
                "a_rule": self.a_rule, "reading": self.reading}


def _sign(x: float) -> float:
    return (x > 0) - (x < 0)


def remark_expansion(params: RemarkKernelParams, xs: Sequence[float]) -> float:
    """Scalar evaluation by explicit permutation / subset expansion.

    ``reading="exponential"`` puts ``- a sum_{i>k} x`` inside the exponent.
    ``reading="printed"`` follows the bracket layout literally:
    ``exp(a sum_{i<=k} x) - sum_{i>k} x`` for the leading term and
    ``exp(...) - a sum_{i>k} x`` for the correction terms.
    """
    m, k, a = params.m, params.k, params.a
    if len(xs) != m:
        raise KernelError(f"expected {m} arguments, got {len(xs)}")
    total = 0.0
    for perm in itertools.permutations(range(m)):
        for size in range(m + 1):
            for drop in itertools.combinations(range(1, m + 1), size):
                coef = (-1) ** size
                for j in drop:
                    coef /= 1.0 - a * _sign(k + 0.5 - j)
                head = sum(xs[perm[i - 1]] for i in range(1, k + 1) if i not in drop)
                tail = sum(xs[perm[i - 1]] for i in range(k + 1, m + 1) if i not in drop)
                if params.reading == "exponential":
                    term = math.exp(a * head - a * tail)
                elif size == 0:
                    term = math.exp(a * head) - tail
                else:
                    term = math.exp(a * head) - a * tail
                total += coef * term
    return total


class RemarkKernel:
    """Vectorized evaluator for the counterexample kernel.

    Calling with ``m`` arrays broadcasts; :meth:`scalar` is a plain-float
    fast path used by quadrature.
    """

    def __init__(self, params: RemarkKernelParams):
        self.params = params
        self.order = params.m
        self.a = params.a
        self._cu = 1.0 / (1.0 - self.a)
        self._cv = 1.0 / (1.0 + self.a)
        self._scale = math.factorial(params.k) * math.factorial(params.m - params.k)
        self._subsets = [set(s) for s in itertools.combinations(range(params.m), params.k)]

    def u(self, x):
        return np.exp(self.a * np.asarray(x)) - self._cu

    def v(self, x):
        return np.exp(-self.a * np.asarray(x)) - self._cv

    def __call__(self, *xs):
        if self.params.reading == "printed":
            return np.vectorize(lambda *z: remark_expansion(self.params, z))(*xs)
        us = [self.u(x) for x in xs]
        vs = [self.v(x) for x in xs]
        total = 0.0
        for subset in self._subsets:
            term = 1.0
            for i in range(self.order):
                term = term * (us[i] if i in subset else vs[i])
            total = total + term
        return self._scale * total

    def scalar(self, *xs: float) -> float:
        if self.params.reading == "printed":
            return remark_expansion(self.params, xs)
        a = self.a
        us = [math.exp(a * x) - self._cu for x in xs]
        vs = [math.exp(-a * x) - self._cv for x in xs]
        total = 0.0
        for subset in self._subsets:
            term = 1.0
            for i in range(self.order):
                term *= us[i] if i in subset else vs[i]
            total += term
        return self._scale * total

    def damped(self, xs: Sequence[float], ds: Sequence[float]) -> float:
        """``Y(xs) * exp(-sum d_i x_i)`` with the damping applied factor by factor."""
        if self.params.reading == "printed":
            return remark_expansion(self.params, xs) * math.exp(
                -math.fsum(d * x for d, x in zip(ds, xs)))
        a = self.a
        us = [math.exp((a - d) * x) - self._cu * math.exp(-d * x) for x, d in zip(xs, ds)]
        vs = [math.exp((-a - d) * x) - self._cv * math.exp(-d * x) for x, d in zip(xs, ds)]
        total = 0.0
        for subset in self._subsets:
            term = 1.0
            for i in range(self.order):
                term *= us[i] if i in subset else vs[i]
            total += term
        return self._scale * total

    def growth_rate(self) -> float:
        """Exponential growth rate of ``|Y|`` in any single coordinate."""
        return self.a


@dataclass(frozen=True)
class ProbeResult:
    """Monte Carlo test of ``E(Y | X_1..X_{m-1} = x) = 0`` at fixed points."""

    points: tuple[tuple[float, ...], ...]
    means: tuple[float, ...]
    stderrs: tuple[float, ...]
    z_scores: tuple[float, ...]
    threshold: float

    @property
    def passed(self) -> bool:
        return all(z <= self.threshold for z in self.z_scores)

    @property
    def max_residual(self) -> float:
        return max(abs(mu) for mu in self.means)

    def to_dict(self) -> dict:
        return {"points": [list(p) for p in self.points], "means": list(self.means),
                "stderrs": list(self.stderrs), "z_scores": list(self.z_scores),
                "threshold": self.threshold, "passed": self.passed}


PROBE_LEVELS = (0.1, 0.3, 0.5, 0.7, 0.9)


def degeneracy_probe(evaluator, m: int, n_draws: int = 20_000, seed: int = 20240611,
                     threshold: float = PROBE_Z) -> ProbeResult:
    """Estimate ``E_{X_m} Y(x_1..x_{m-1}, X_m)`` at five fixed prefixes.

    Prefix coordinates are exponential(1) quantiles, rotated so that the
    probes differ in every coordinate.
    """
    quantiles = [-math.log(1.0 - q) for q in PROBE_LEVELS]
    points, means, errs, zs = [], [], [], []
    sampler = Sampler.exponential()
    for j in range(len(PROBE_LEVELS)):
        prefix = tuple(quantiles[(j + i) % len(quantiles)] for i in range(m - 1))
        x_last = sampler.draw(chunk_rng(seed, j), n_draws)
        args = [np.full(n_draws, c) for c in prefix] + [x_last]
        y = np.asarray(evaluator(*args), dtype=float)
        mu = float(np.mean(y))
        se = float(np.std(y, ddof=1) / math.sqrt(n_draws))
        points.append(prefix)
        means.append(mu)
        errs.append(se)
        zs.append(abs(mu) / se if se > 0 else (0.0 if mu == 0 else math.inf))
    return ProbeResult(tuple(points), tuple(means), tuple(errs), tuple(zs), threshold)


def remark_kernel(params: RemarkKernelParams, probe: bool = True,
                  **probe_kw) -> RemarkKernel:
    """Build the counterexample evaluator; by default it must pass the probe."""
    kernel = RemarkKernel(params)
    if probe:
        result = degeneracy_probe(kernel, params.m, **probe_kw)
        if not result.passed:
            raise NotDegenerateError(
                result.max_residual,
                f"reading {params.reading!r} fails the degeneracy probe "
                f"(max z = {max(result.z_scores):.2f}, max |mean| = "
                f"{result.max_residual:.3e}); the printed kernel formula is ambiguous "
                "and this reconstruction does not satisfy E(Y | X_1..X_(m-1)) = 0")
    return kernel


# -- conditional moments under exponential(1) --------------------------------

def _integrate(fn: Callable[[float], float], decay: float) -> float:
    """``int_0^inf fn(x) dx`` for an integrand decaying like ``exp(-decay x)``.

    The half-line is cut at 0, 1, 4, 16, ... up to ``60 / decay`` so that
    slowly decaying integrands are resolved piece by piece.
    """
    if decay <= 0:
        raise KernelError("integrand does not decay; the moment is infinite")
    cuts = [0.0, 1.0]
    while cuts[-1] < 60.0 / decay:
        cuts.append(cuts[-1] * 4.0)
    total = 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        val, _ = integrate.quad(fn, lo, hi, epsabs=0.0, epsrel=QUAD_RTOL, limit=200)
        total += val
    tail, _ = integrate.quad(fn, cuts[-1], math.inf, epsabs=0.0, epsrel=QUAD_RTOL, limit=200)
    return total + tail


def _integrate_many(fn: Callable[..., float], dims: int, decay: float) -> float:
    if dims == 0:
        return fn()
    return _integrate(
        lambda x: _integrate_many(lambda *rest: fn(x, *rest), dims - 1, decay), decay)


def _damped(kernel, xs, ds) -> float:
    """``Y(xs) * exp(-sum d_i x_i)``, overflow-free when the kernel supports it."""
    if hasattr(kernel, "damped"):
        return kernel.damped(xs, ds)
    return kernel.scalar(*xs) * math.exp(-math.fsum(d * x for d, x in zip(ds, xs)))


def quad_cond_moment(kernel, l: int, r: float, inner: str = "square") -> float:
    """``E[(E[h(Y) | X_1..X_l])^r]`` under exponential(1) by nested quadrature.

    The exponential density is folded into the kernel: with ``q = 2`` for
    ``h = Y^2`` and ``q = 1`` for ``h = Y``, the functional equals
    ``int (int |Y e^{-sum x/(q r) - sum y/q}|^q dy)^r dx`` over Lebesgue
    measure, which keeps every integrand bounded even when the moment is
    dominated by very large arguments. Orders ``m <= 2`` only.
    """
    m = kernel.order
    if m > 2:
        raise KernelError("quadrature is implemented for m <= 2; use Monte Carlo")
    if not (0 <= l <= m):
        raise KernelError(f"need 0 <= l <= m, got l={l}, m={m}")
    if inner not in ("identity", "square"):
        raise KernelError(f"inner must be 'identity' or 'square', got {inner!r}")
    q = 2.0 if inner == "square" else 1.0
    g = kernel.growth_rate()
    inner_decay = 1.0 - q * g
    outer_decay = 1.0 - q * r * g
    ds = [1.0 / (q * r)] * l + [1.0 / q] * (m - l)

    def cond(*head):
        def h(*tail):
            y = _damped(kernel, head + tail, ds)
            return y * y if q == 2.0 else y
        return _integrate_many(h, m - l, inner_decay)

    def powered(*head):
        return abs(cond(*head)) ** r

    if l == 0:
        return powered()
    return _integrate_many(powered, l, outer_decay)


def remark_cond_moment(kernel: RemarkKernel, l: int, r: float, method: str = "auto",
                       n_outer: int = 20_000, n_inner: int = 200, seed: int = 0) -> float:
    if method == "auto":
        method = "quad" if kernel.order <= 2 else "mc"
    if method == "quad":
        return quad_cond_moment(kernel, l, r)
    if method == "mc":
        est = mc_cond_moment(kernel, Sampler.exponential(), l, "square", r,
                             n_outer=n_outer, n_inner=n_inner, seed=seed)
        return est.mean
    raise KernelError(f"unknown method {method!r}")


# -- growth study --------------------------------------------------------------

READING_EXPONENTS = {"display": "(p/2)(m-l)+1", "phi_n": "(p/2)(m-l)+l"}


def predicted_exponent(m: int, k: int, l: int, p: float, reading: str = "display") -> float:
    """Claimed growth order of the ``l``-th term for the ``k``-th counterexample.

    ``display``: ``pm/2 + 1`` for ``l <= k``; ``phi_n``: ``pm/2 + l`` for
    ``l <= k``. Both use ``(p/2)(m+k) - (p/2 - 1) l`` for ``l > k``.
    """
    if l > k:
        return (p / 2) * (m + k) - (p / 2 - 1) * l
    if reading == "display":
        return p * m / 2 + 1
    if reading == "phi_n":
        return p * m / 2 + l
    raise KernelError(f"unknown reading {reading!r}")


def term_exponent(m: int, l: int, p: float, reading: str = "display") -> float:
    """Power of ``n`` multiplying ``M_l``: ``+1`` (display) or ``+l`` (``phi_n``)."""
    if reading == "display":
        return (p / 2) * (m - l) + 1
    if reading == "phi_n":
        return (p / 2) * (m - l) + l
    raise KernelError(f"unknown reading {reading!r}")


@dataclass(frozen=True)
class GrowthTerm:
    l: int
    fitted_slope: float
    predicted_exponent: float
    residual: float
    theorem_slope: float
    theorem_predicted: float
    theorem_residual: float
    fit_r2: float

    def to_dict(self) -> dict:
        return {"l": self.l, "fitted_slope": self.fitted_slope,
                "predicted_exponent": self.predicted_exponent, "residual": self.residual,
                "theorem_slope": self.theorem_slope,
                "theorem_predicted": self.theorem_predicted,
                "theorem_residual": self.theorem_residual, "fit_r2": self.fit_r2}


@dataclass(frozen=True)
class GrowthResult:
    """Fitted log-log slopes of each term against their claimed orders.

    Two readings of the exponent are kept side by side. ``fitted_slope``,
    ``predicted_exponent`` and ``residual`` use the displayed ``+1`` suffix;
    the ``theorem_*`` fields use the ``+l`` suffix of ``phi_n`` with the
    matching claim ``pm/2 + l``. ``dominant_l`` is the argmax of the
    ``phi_n`` terms at the largest ``n``.
    """

    m: int
    k: int
    p: float
    n_grid: tuple[int, ...]
    per_l: tuple[GrowthTerm, ...]
    fit_r2: float
    moments: tuple[tuple[float, ...], ...]
    dominant_l: int
    metadata: dict = field(default_factory=dict)

    def terms(self, l: int, reading: str = "display") -> list[float]:
        e = term_exponent(self.m, l, self.p, reading)
        return [n ** e * mom[l] for n, mom in zip(self.n_grid, self.moments)]

    def max_residual(self, reading: str = "display") -> float:
        if reading == "display":
            return max(abs(t.residual) for t in self.per_l)
        return max(abs(t.theorem_residual) for t in self.per_l)

    def passed(self, tol: float = 0.15, reading: str = "display") -> bool:
        return self.max_residual(reading) <= tol and self.dominant_l == self.k

    def to_dict(self) -> dict:
        return {"m": self.m, "k": self.k, "p": self.p, "n_grid": list(self.n_grid),
                "per_l": [t.to_dict() for t in self.per_l], "fit_r2": self.fit_r2,
                "moments": [list(r) for r in self.moments], "dominant_l": self.dominant_l,
                "metadata": self.metadata}


def _fit(ns: Sequence[int], ys: Sequence[float]) -> tuple[float, float]:
    lx, ly = np.log(np.asarray(ns, float)), np.log(np.asarray(ys, float))
    slope, icept = np.polyfit(lx, ly, 1)
    pred = slope * lx + icept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    return float(slope), 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0


def growth_study(template: RemarkKernelParams, n_grid: Sequence[int], method: str = "auto",
                 *, kernel_factory: Callable[[RemarkKernelParams], object] | None = None,
                 probe: bool = True, mc_outer: int = 20_000, mc_inner: int = 200,
                 seed: int = 0) -> GrowthResult:
    """Fit growth orders of the ``phi_n`` terms of the counterexample kernel.

    For every ``n`` the kernel is rebuilt with ``a = a(n)`` and
    ``M_l = E(E(Y^2 | X_1..X_l))^(p/2)`` is computed for ``l = 0..m``
    (quadrature for ``m <= 2``, nested Monte Carlo otherwise).
    """
    n_grid = list(n_grid)
    if len(n_grid) < 4:
        raise KernelError("growth study needs at least four grid points")
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise KernelError("n_grid must be strictly increasing")
    if n_grid[-1] < 10 * n_grid[0]:
        raise KernelError("n_grid must span at least one decade")
    m, k, p = template.m, template.k, template.p
    r = p / 2
    factory = kernel_factory or (lambda prm: remark_kernel(prm, probe=probe))
    moments = []
    for idx, n in enumerate(n_grid):
        kern = factory(template.with_n(n))
        row = tuple(remark_cond_moment(kern, l, r, method, mc_outer, mc_inner, seed + idx)
                    for l in range(m + 1))
        moments.append(row)
    if all(v == 0 for row in moments for v in row):
        raise DegenerateZeroKernel("every term vanishes on the grid (degenerate-zero)")
    per_l, r2s = [], []
    for l in range(m + 1):
        vals = [mom[l] for mom in moments]
        if any(v <= 0 for v in vals):
            raise DegenerateZeroKernel(f"term l={l} vanishes on part of the grid")
        fits = {}
        for reading in ("display", "phi_n"):
            e = term_exponent(m, l, p, reading)
            fits[reading] = _fit(n_grid, [n ** e * v for n, v in zip(n_grid, vals)])
        slope, r2 = fits["display"]
        tslope, _ = fits["phi_n"]
        pred = predicted_exponent(m, k, l, p, "display")
        tpred = predicted_exponent(m, k, l, p, "phi_n")
        per_l.append(GrowthTerm(l, slope, pred, slope - pred, tslope, tpred,
                                tslope - tpred, r2))
        r2s.append(r2)
    last, n_last = moments[-1], n_grid[-1]
    phi_last = [n_last ** term_exponent(m, l, p, "phi_n") * last[l] for l in range(m + 1)]
    disp_last = [n_last ** term_exponent(m, l, p, "display") * last[l] for l in range(m + 1)]
    meta = {
        "exponent_readings": READING_EXPONENTS,
        "dominant_from": "phi_n",
        "dominant_l_display": int(np.argmax(disp_last)),
        "a_rule": template.a_rule,
        "reading": template.reading,
        "method": method if method != "auto" else ("quad" if m <= 2 else "mc"),
        "a_values": [template.with_n(n).a for n in n_grid],
    }
    return GrowthResult(m, k, float(p), tuple(n_grid), tuple(per_l), float(min(r2s)),
                        tuple(moments), int(np.argmax(phi_last)), meta)


GROWTH_CSV_COLUMNS = ("l", "n", "term", "log_term")


def write_growth_csv(result: GrowthResult, fh, reading: str = "phi_n"):
    """Write one row per ``(l, n)``: ``l, n, term, log_term`` with 17 significant digits."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(GROWTH_CSV_COLUMNS)
    for l in range(result.m + 1):
        for n, t in zip(result.n_grid, result.terms(l, reading)):
            writer.writerow([l, n, f"{t:.17g}", f"{math.log(t):.17g}"])


# -- empirical constants ------------------------------------------------------

@dataclass(frozen=True)
class ConstantsResult:
    """Envelope of ``exact / bound`` over a corpus and grid.

    Any valid lower constant is at most ``ratio_inf``; any valid upper
    constant is at least ``ratio_sup`` (on this corpus).
    """

    theorem: int
    p: float
    m: int
    ratio_inf: float
    ratio_sup: float
    witness_inf: tuple[str, int]
    witness_sup: tuple[str, int]
    skipped: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"theorem": self.theorem, "p": self.p, "m": self.m,
                "ratio_inf": self.ratio_inf, "ratio_sup": self.ratio_sup,
                "witness_inf": {"kernel": self.witness_inf[0], "n": self.witness_inf[1]},
                "witness_sup": {"kernel": self.witness_sup[0], "n": self.witness_sup[1]},
                "skipped": list(self.skipped), "provenance": "exact"}


_VERIFIERS = {1: verify_theorem1, 2: verify_theorem2, 3: verify_theorem3}


def _entry_parts(entry) -> tuple[str, object, object]:
    if isinstance(entry, CorpusEntry):
        return entry.name, entry.kernel, entry.dist
    name, kernel, dist = entry
    return name, kernel, dist


def estimate_constants(corpus: Iterable, theorem: int, p: float,
                       n_grid: Sequence[int], **oracle_kw) -> ConstantsResult:
    """Empirical ``A(p, m)``, ``B(p, m)`` surrogates over ``corpus``.

    ``corpus`` holds :class:`~symstat.core.CorpusEntry` objects or
    ``(name, kernel, dist)`` triples, all of the same order.
    """
    if theorem not in _VERIFIERS:
        raise KernelError(f"theorem must be 1, 2 or 3, got {theorem}")
    items = [_entry_parts(e) for e in corpus]
    if not items:
        raise KernelError("corpus is empty")
    orders = {kernel.order for _, kernel, _ in items}
    if len(orders) != 1:
        raise KernelError(f"corpus mixes kernel orders {sorted(orders)}")
    bad = []
    for name, kernel, dist in items:
        if theorem == 1 and not kernel.is_nonnegative():
            bad.append(name)
        if theorem in (2, 3) and check_degeneracy(kernel, dist) > ATOL:
            bad.append(name)
    if bad:
        need = "nonnegative" if theorem == 1 else "degenerate"
        raise KernelError(f"mixed-precondition corpus: {', '.join(bad)} not {need}")
    lo, hi = (math.inf, None), (-math.inf, None)
    skipped = []
    for name, kernel, dist in items:
        report: BoundReport = _VERIFIERS[theorem](kernel, dist, n_grid, p, **oracle_kw)
        if "degenerate-zero" in report.flags:
            skipped.append(name)
            continue
        for row in report.rows:
            if row.ratio is None:
                continue
            if row.ratio < lo[0]:
                lo = (row.ratio, (name, row.n))
            if row.ratio > hi[0]:
                hi = (row.ratio, (name, row.n))
    if lo[1] is None:
        raise DegenerateZeroKernel("no kernel in the corpus produced a finite ratio")
    return ConstantsResult(theorem, float(p), orders.pop(), lo[0], hi[0], lo[1], hi[1],
                           tuple(skipped))


__all__ = [
    "ConstantsResult", "GrowthResult", "GrowthTerm", "ProbeResult", "RemarkKernel",
    "RemarkKernelParams", "degeneracy_probe", "estimate_constants", "growth_study",
    "log_slope", "predicted_exponent", "quad_cond_moment", "remark_expansion",
    "remark_kernel", "term_exponent", "write_growth_csv",
]
