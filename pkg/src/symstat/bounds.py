"""
Bound expressions for moments of U-statistics and their two-sided checks.

The two-sided inequalities hold up to constants ``A(p, m)``, ``B(p, m)``
that are never given numerically, so a :class:`BoundReport` records the
empirical envelope of ``exact / bound`` and the log-log slope of that ratio
rather than asserting fixed constants. Only the constant-free consequences
(Jensen/Lyapunov lower bounds, second-moment orthogonality) are pass/fail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (ATOL, FiniteDistribution, KernelTable, check_degeneracy,
                   kernel_mean)
from .errors import KernelError, NotDegenerateError
from .oracle import cond_moment, exact_sumsq_moment, exact_Tn_moment

SLACK_TOL = 1e-10
LEMMA2_TOL = 1e-12


@dataclass(frozen=True)
class BoundTerms:
    """Per-``k`` terms ``n^exponent(k) * M_k`` of a max-over-``k`` bound."""

    terms: tuple[float, ...]
    exponents: tuple[float, ...]
    argmax_k: int
    max_value: float
    n: int
    p: float

    def to_dict(self) -> dict:
        return {"terms": list(self.terms), "exponents": list(self.exponents),
                "argmax_k": self.argmax_k, "max_value": self.max_value,
                "n": self.n, "p": self.p}


def _bound_terms(moments: Sequence[float], exponents: Sequence[float], n: int,
                 p: float) -> BoundTerms:
    terms = tuple(float(n) ** e * mk for e, mk in zip(exponents, moments))
    k = int(np.argmax(terms))
    return BoundTerms(terms, tuple(float(e) for e in exponents), k, terms[k], n, float(p))


def psi_exponents(m: int, p: float) -> list[float]:
    return [p * (m - k) + k for k in range(m + 1)]


def phi_exponents(m: int, p: float) -> list[float]:
    return [(p / 2) * (m - k) + k for k in range(m + 1)]


def require_nonnegative(kernel: KernelTable):
    if not kernel.is_nonnegative():
        bad = min(kernel.entries.values())
        raise KernelError(f"kernel must be nonnegative (minimum entry {bad!r})")


def require_degenerate(kernel: KernelTable, dist: FiniteDistribution):
    resid = check_degeneracy(kernel, dist)
    if resid > ATOL:
        raise NotDegenerateError(resid)


def psi_n(kernel: KernelTable, dist: FiniteDistribution, n: int, p: float) -> BoundTerms:
    """Rosenthal-type bound for nonnegative kernels.

    ``terms[k] = n^(p(m-k)+k) * E(E(Y | X_1..X_k))^p`` for ``k = 0..m``.
    """
    if p < 1:
        raise KernelError(f"p must be >= 1, got {p}")
    require_nonnegative(kernel)
    m = kernel.order
    moments = [cond_moment(kernel, dist, k, "identity", p) for k in range(m + 1)]
    return _bound_terms(moments, psi_exponents(m, p), n, p)


def phi_n(kernel: KernelTable, dist: FiniteDistribution, n: int, p: float) -> BoundTerms:
    """Khintchine/Rosenthal-type bound for degenerate kernels.

    ``terms[k] = n^((p/2)(m-k)+k) * E(E(Y^2 | X_1..X_k))^(p/2)``.
    """
    if p < 2:
        raise KernelError(f"p must be >= 2, got {p}")
    require_degenerate(kernel, dist)
    m = kernel.order
    moments = [cond_moment(kernel, dist, k, "square", p / 2) for k in range(m + 1)]
    return _bound_terms(moments, phi_exponents(m, p), n, p)


@dataclass(frozen=True)
class InvariantCheck:
    """One constant-free inequality at one ``n``: ``lhs >= rhs`` or ``lhs == rhs``."""

    name: str
    n: int
    lhs: float
    rhs: float
    slack: float
    ok: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "n": self.n, "lhs": self.lhs, "rhs": self.rhs,
                "slack": self.slack, "ok": self.ok}


def _relative_slack(lhs: float, rhs: float) -> float:
    scale = abs(rhs) if rhs != 0 else 1.0
    return (lhs - rhs) / scale


def _geq(name, n, lhs, rhs) -> InvariantCheck:
    slack = _relative_slack(lhs, rhs)
    return InvariantCheck(name, n, lhs, rhs, slack, slack >= -SLACK_TOL)


def _eq(name, n, lhs, rhs) -> InvariantCheck:
    slack = -abs(_relative_slack(lhs, rhs))
    return InvariantCheck(name, n, lhs, rhs, slack, slack >= -SLACK_TOL)


@dataclass(frozen=True)
class BoundRow:
    n: int
    exact_moment: float
    bound_value: float
    ratio: float | None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"n": self.n, "exact_moment": self.exact_moment,
                "bound_value": self.bound_value, "ratio": self.ratio, **self.extra}


@dataclass(frozen=True)
class BoundReport:
    theorem: int
    p: float
    m: int
    rows: tuple[BoundRow, ...]
    ratio_min: float | None
    ratio_max: float | None
    slope_of_log_ratio: float | None
    checks: tuple[InvariantCheck, ...] = ()
    flags: tuple[str, ...] = ()

    @property
    def violations(self) -> list[InvariantCheck]:
        return [c for c in self.checks if not c.ok]

    @property
    def ratios(self) -> list[float]:
        return [r.ratio for r in self.rows if r.ratio is not None]

    def to_dict(self) -> dict:
        return {"theorem": self.theorem, "p": self.p, "m": self.m,
                "rows": [r.to_dict() for r in self.rows],
                "ratio_min": self.ratio_min, "ratio_max": self.ratio_max,
                "slope_of_log_ratio": self.slope_of_log_ratio,
                "checks": [c.to_dict() for c in self.checks],
                "violations": len(self.violations), "flags": list(self.flags),
                "provenance": "exact"}


def log_slope(xs: Sequence[float], ys: Sequence[float]) -> float | None:
    """Least-squares slope of ``log y`` against ``log x`` (positive pairs only)."""
    pts = [(math.log(x), math.log(y)) for x, y in zip(xs, ys) if x > 0 and y and y > 0]
    if len(pts) < 2:
        return None
    lx, ly = np.array(pts).T
    return float(np.polyfit(lx, ly, 1)[0])


def _check_grid(n_grid: Sequence[int], m: int):
    if not n_grid:
        raise KernelError("n_grid is empty")
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise KernelError("n_grid must be strictly increasing")
    if n_grid[0] < m:
        raise KernelError(f"n_grid starts at {n_grid[0]}, below the kernel order {m}")


def _assemble(theorem, p, m, rows, checks, flags=()) -> BoundReport:
    ratios = [r.ratio for r in rows if r.ratio is not None]
    slope = log_slope([r.n for r in rows if r.ratio is not None], ratios)
    return BoundReport(theorem, float(p), m, tuple(rows),
                       min(ratios) if ratios else None,
                       max(ratios) if ratios else None,
                       slope, tuple(checks), tuple(flags))


def _ratio(exact: float, bound: float) -> float | None:
    return exact / bound if bound > 0 else None


def verify_theorem1(kernel: KernelTable, dist: FiniteDistribution, n_grid: Sequence[int],
                    p: float, **oracle_kw) -> BoundReport:
    """Pair ``E T_n^p`` with ``psi_n`` over ``n_grid`` for a nonnegative kernel.

    Also checks the two constant-free lower bounds
    ``E T_n^p >= (C(n,m) E Y)^p`` and ``E T_n^p >= C(n,m) E Y^p``.
    """
    require_nonnegative(kernel)
    m = kernel.order
    _check_grid(n_grid, m)
    if kernel.is_zero():
        rows = [BoundRow(n, 0.0, 0.0, None) for n in n_grid]
        return _assemble(1, p, m, rows, [], ("degenerate-zero",))
    ey = kernel_mean(kernel, dist)
    eyp = cond_moment(kernel, dist, m, "identity", p)
    rows, checks = [], []
    for n in n_grid:
        exact = exact_Tn_moment(kernel, dist, n, p, **oracle_kw).value
        bound = psi_n(kernel, dist, n, p)
        c = math.comb(n, m)
        checks.append(_geq("mean_power_lower_bound", n, exact, (c * ey) ** p))
        checks.append(_geq("moment_sum_lower_bound", n, exact, c * eyp))
        rows.append(BoundRow(n, exact, bound.max_value, _ratio(exact, bound.max_value),
                             {"argmax_k": bound.argmax_k}))
    return _assemble(1, p, m, rows, checks)


def _degenerate_checks(n, m, p, exact_abs, ey2):
    """Constant-free facts for canonical kernels at sample size ``n``."""
    second = math.comb(n, m) * ey2
    out = [_geq("lyapunov_lower_bound", n, exact_abs, second ** (p / 2))]
    if p == 2:
        out.append(_eq("second_moment_orthogonality", n, exact_abs, second))
    return out


def verify_theorem2(kernel: KernelTable, dist: FiniteDistribution, n_grid: Sequence[int],
                    p: float, **oracle_kw) -> BoundReport:
    """Pair ``E|T_n|^p`` with ``phi_n`` over ``n_grid`` for a degenerate kernel."""
    if p < 2:
        raise KernelError(f"p must be >= 2, got {p}")
    require_degenerate(kernel, dist)
    m = kernel.order
    _check_grid(n_grid, m)
    if kernel.is_zero():
        rows = [BoundRow(n, 0.0, 0.0, None) for n in n_grid]
        return _assemble(2, p, m, rows, [], ("degenerate-zero",))
    ey2 = cond_moment(kernel, dist, 0, "square", 1)
    rows, checks = [], []
    for n in n_grid:
        exact = exact_Tn_moment(kernel, dist, n, p, **oracle_kw).value
        bound = phi_n(kernel, dist, n, p)
        checks += _degenerate_checks(n, m, p, exact, ey2)
        rows.append(BoundRow(n, exact, bound.max_value, _ratio(exact, bound.max_value),
                             {"argmax_k": bound.argmax_k}))
    return _assemble(2, p, m, rows, checks)


def verify_theorem3(kernel: KernelTable, dist: FiniteDistribution, n_grid: Sequence[int],
                    p: float, **oracle_kw) -> BoundReport:
    """Pair ``E|T_n|^p`` with ``E(sum Y^2)^(p/2)`` over ``n_grid``.

    Each row also records ``phi_n`` and ``Lambda_n / phi_n``; the latter
    should stay within a bounded factor across the grid.
    """
    if p < 2:
        raise KernelError(f"p must be >= 2, got {p}")
    require_degenerate(kernel, dist)
    m = kernel.order
    _check_grid(n_grid, m)
    if kernel.is_zero():
        rows = [BoundRow(n, 0.0, 0.0, None) for n in n_grid]
        return _assemble(3, p, m, rows, [], ("degenerate-zero",))
    ey2 = cond_moment(kernel, dist, 0, "square", 1)
    rows, checks = [], []
    for n in n_grid:
        exact = exact_Tn_moment(kernel, dist, n, p, **oracle_kw).value
        lam = exact_sumsq_moment(kernel, dist, n, p, **oracle_kw)
        phi = phi_n(kernel, dist, n, p).max_value
        checks += _degenerate_checks(n, m, p, exact, ey2)
        if p == 2:
            checks.append(_eq("sum_of_squares_identity", n, exact, lam))
        rows.append(BoundRow(n, exact, lam, _ratio(exact, lam),
                             {"phi": phi, "lambda_over_phi": lam / phi}))
    return _assemble(3, p, m, rows, checks)


def lambda_phi_spread(report: BoundReport) -> float:
    """``max / min`` of ``Lambda_n / phi_n`` over a theorem-3 report."""
    vals = [r.extra["lambda_over_phi"] for r in report.rows]
    return max(vals) / min(vals)


# -- sequence inequalities ----------------------------------------------------

@dataclass(frozen=True)
class SequenceFamily:
    """Finitely many independent nonnegative variables, each with a finite law."""

    members: tuple[FiniteDistribution, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise KernelError("sequence family is empty")
        for i, d in enumerate(self.members):
            if min(d.values) < 0:
                raise KernelError(f"members[{i}] has a negative value")

    def power_sum(self, r: float) -> float:
        """``A_r = sum_i E X_i^r``."""
        return math.fsum(q * v ** r for d in self.members for v, q in zip(d.values, d.probs))

    def b(self, gamma: float) -> float:
        """``B_gamma = (sum_i E X_i^gamma)^(1/gamma)``."""
        return self.power_sum(gamma) ** (1.0 / gamma)

    def to_dict(self) -> dict:
        return {"members": [d.to_dict() for d in self.members]}


@dataclass(frozen=True)
class Lemma2Slacks:
    """Relative slack ``(rhs - lhs) / max(|lhs|, |rhs|)`` per part (``None`` = not applicable)."""

    part1: float | None
    part2: float | None
    part3: float | None

    def values(self) -> list[float]:
        return [v for v in (self.part1, self.part2, self.part3) if v is not None]

    @property
    def ok(self) -> bool:
        return all(v >= -LEMMA2_TOL for v in self.values())

    def to_dict(self) -> dict:
        return {"part1": self.part1, "part2": self.part2, "part3": self.part3,
                "ok": self.ok}


def _lemma_slack(lhs: float, rhs: float) -> float:
    scale = max(abs(lhs), abs(rhs))
    return (rhs - lhs) / scale if scale > 0 else 0.0


def lemma2_check(seq: SequenceFamily, gamma: float, s: float, p: float,
                 parts: Sequence[int] | None = None) -> Lemma2Slacks:
    """Slacks of the three power-sum interpolation inequalities.

    1. ``A_s <= (A_p^(s-g) B_g^(g(p-s)))^(1/(p-g))`` for ``1 <= g < s < p``
    2. ``A_p B_g^s <= max(A_{p+s}, B_g^(p+s))`` for ``p > g``, ``s >= 0``
    3. ``max(A_s, B_g^s) <= max(A_p, B_g^p)^(s/p)`` for ``1 <= g < s < p``

    Without ``parts`` every applicable part is evaluated; naming a part
    whose parameter range is violated raises. Slacks are relative so that
    the tolerance does not depend on the scale of the sequence.
    """
    interp_ok = 1 <= gamma < s < p
    part2_ok = p > gamma and s >= 0
    if parts is None:
        parts = [i for i, ok in ((1, interp_ok), (2, part2_ok), (3, interp_ok)) if ok]
        if not parts:
            raise KernelError(f"no part applies to gamma={gamma}, s={s}, p={p}")
    for part in parts:
        if part in (1, 3) and not interp_ok:
            raise KernelError(f"part {part} needs 1 <= gamma < s < p")
        if part == 2 and not part2_ok:
            raise KernelError("part 2 needs p > gamma and s >= 0")
        if part not in (1, 2, 3):
            raise KernelError(f"unknown part {part}")
    b = seq.b(gamma)
    out = {1: None, 2: None, 3: None}
    if 1 in parts:
        rhs = (seq.power_sum(p) ** (s - gamma) * b ** (gamma * (p - s))) ** (1 / (p - gamma))
        out[1] = _lemma_slack(seq.power_sum(s), rhs)
    if 2 in parts:
        out[2] = _lemma_slack(seq.power_sum(p) * b ** s,
                              max(seq.power_sum(p + s), b ** (p + s)))
    if 3 in parts:
        out[3] = _lemma_slack(max(seq.power_sum(s), b ** s),
                              max(seq.power_sum(p), b ** p) ** (s / p))
    return Lemma2Slacks(out[1], out[2], out[3])


def ineq7_check(kernel: KernelTable, dist: FiniteDistribution, n: int, k: int, l: int,
                s: float) -> float:
    """Ratio ``LHS / RHS`` of the cross-term inequality for nonnegative kernels.

    ``LHS = n^(k+l+s(2m-k-l)) M_k(s) M_l(s)`` and
    ``RHS = max(n^(k+2s(m-k)) M_k(2s), n^(l+2s(m-l)) M_l(2s), n^(2sm) (EY)^(2s))``,
    where ``M_j(r) = E(E(Y | X_1..X_j))^r``. Values above 1 are witnesses
    for the unspecified constant ``B(s, m)``.
    """
    require_nonnegative(kernel)
    m = kernel.order
    if not (0 <= k <= m and 0 <= l <= m):
        raise KernelError(f"need 0 <= k, l <= m, got k={k}, l={l}, m={m}")
    if s < 1:
        raise KernelError(f"s must be >= 1, got {s}")
    mk = cond_moment(kernel, dist, k, "identity", s)
    ml = cond_moment(kernel, dist, l, "identity", s)
    ey = kernel_mean(kernel, dist)
    lhs = n ** (k + l + s * (2 * m - k - l)) * mk * ml
    rhs = max(n ** (k + 2 * s * (m - k)) * cond_moment(kernel, dist, k, "identity", 2 * s),
              n ** (l + 2 * s * (m - l)) * cond_moment(kernel, dist, l, "identity", 2 * s),
              n ** (2 * s * m) * ey ** (2 * s))
    if rhs == 0:
        return 0.0
    return lhs / rhs
