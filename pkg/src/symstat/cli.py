"""
Command-line entry point.

Every command writes one JSON report (``command``, ``config``, ``results``,
``tool_version``, ``wall_time``) or, where the result is a table, CSV.
Exit status is 0 on success, 2 when a constant-free inequality is violated,
and 1 on usage, input or budget errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from pathlib import Path

from . import __version__
from .bounds import (SequenceFamily, ineq7_check, lemma2_check, verify_theorem1,
                     verify_theorem2, verify_theorem3)
from .core import (KERNEL_KINDS, FiniteDistribution, KernelSpec, build_kernel,
                   hoeffding_project, multisets)
from .errors import SpecError, SymstatError
from .experiments import (A_RULES, GROWTH_CSV_COLUMNS, READINGS, RemarkKernelParams,
                          estimate_constants, growth_study, write_growth_csv)
from .montecarlo import Sampler, TableEvaluator, mc_Tn_moment
from .oracle import exact_Tn_moment

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2

VERIFY_CSV_COLUMNS = ("n", "exact_moment", "bound_value", "ratio")
LEMMA2_CSV_COLUMNS = ("part", "slack")

_SPEC_KEYS = {
    "table": {"entries"},
    "product": set(),
    "sum_power": {"r"},
    "constant": {"c"},
    "remark_exponential": {"k", "p"},
}


class UsageError(Exception):
    """Bad command-line arguments."""


# -- input files ---------------------------------------------------------------

def _load_json(path) -> object:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecError(str(path), f"cannot read file ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None


def _number(obj, path, integer=False):
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise SpecError(path, f"expected a number, got {type(obj).__name__}")
    if integer:
        if not float(obj).is_integer():
            raise SpecError(path, f"expected an integer, got {obj!r}")
        return int(obj)
    if not math.isfinite(obj):
        raise SpecError(path, "must be finite")
    return float(obj)


def _parse_dist(obj, path="dist") -> FiniteDistribution:
    if not isinstance(obj, dict):
        raise SpecError(path, "expected an object with 'values' and 'probs'")
    extra = set(obj) - {"values", "probs"}
    if extra:
        raise SpecError(f"{path}.{sorted(extra)[0]}", "unknown key")
    for key in ("values", "probs"):
        if key not in obj:
            raise SpecError(f"{path}.{key}", "missing")
        if not isinstance(obj[key], list):
            raise SpecError(f"{path}.{key}", "expected a list")
    values = [_number(v, f"{path}.values[{i}]") for i, v in enumerate(obj["values"])]
    probs = [_number(v, f"{path}.probs[{i}]") for i, v in enumerate(obj["probs"])]
    try:
        return FiniteDistribution(tuple(values), tuple(probs))
    except SymstatError as exc:
        raise SpecError(path, str(exc)) from None


def _parse_entries(obj, m: int, s: int) -> dict:
    if not isinstance(obj, dict):
        raise SpecError("entries", "expected an object keyed by 'i,j,...'")
    out = {}
    for key, value in obj.items():
        try:
            idx = tuple(int(t) for t in key.split(","))
        except ValueError:
            raise SpecError(f"entries[{key}]", "key must be comma-joined integers") from None
        if len(idx) != m:
            raise SpecError(f"entries[{key}]", f"expected {m} indices")
        if list(idx) != sorted(idx):
            raise SpecError(f"entries[{key}]", "indices must be sorted (multiset key)")
        if min(idx) < 0 or max(idx) >= s:
            raise SpecError(f"entries[{key}]", f"index outside alphabet 0..{s - 1}")
        out[idx] = _number(value, f"entries[{key}]")
    for key in multisets(s, m):
        if key not in out:
            raise SpecError(f"entries[{','.join(map(str, key))}]", "missing")
    return out


def spec_from_dict(obj) -> KernelSpec:
    """Validate a decoded kernel JSON object; errors name the offending key."""
    if not isinstance(obj, dict):
        raise SpecError("<root>", "expected a JSON object")
    if "kind" not in obj:
        raise SpecError("kind", "missing")
    kind = obj["kind"]
    if kind not in KERNEL_KINDS:
        raise SpecError("kind", f"unknown kind {kind!r}; expected one of {list(KERNEL_KINDS)}")
    allowed = {"kind", "m", "dist"} | _SPEC_KEYS[kind]
    if kind == "remark_exponential":
        allowed.discard("dist")
    for key in obj:
        if key not in allowed:
            raise SpecError(key, f"unknown key for kind {kind!r}")
    missing = sorted(allowed - {"dist"} - set(obj))
    if missing:
        raise SpecError(missing[0], "missing")
    m = _number(obj["m"], "m", integer=True)
    if m < 1:
        raise SpecError("m", "must be >= 1")
    kw = {}
    if kind != "remark_exponential":
        if "dist" not in obj:
            raise SpecError("dist", "missing")
        kw["dist"] = _parse_dist(obj["dist"])
    if kind == "table":
        kw["entries"] = _parse_entries(obj["entries"], m, kw["dist"].size)
    if kind == "sum_power":
        kw["r"] = _number(obj["r"], "r")
    if kind == "constant":
        kw["c"] = _number(obj["c"], "c")
    if kind == "remark_exponential":
        kw["k"] = _number(obj["k"], "k", integer=True)
        kw["p"] = _number(obj["p"], "p")
    try:
        return KernelSpec(kind, m, **kw)
    except SymstatError as exc:
        raise SpecError(kind, str(exc)) from None


def parse_kernel_spec(path) -> KernelSpec:
    """Read and validate a kernel JSON file."""
    return spec_from_dict(_load_json(path))


def parse_sequence(path) -> SequenceFamily:
    obj = _load_json(path)
    if not isinstance(obj, dict) or set(obj) != {"members"}:
        raise SpecError("members", "expected an object with the single key 'members'")
    if not isinstance(obj["members"], list) or not obj["members"]:
        raise SpecError("members", "expected a non-empty list")
    members = [_parse_dist(d, f"members[{i}]") for i, d in enumerate(obj["members"])]
    try:
        return SequenceFamily(members)
    except SymstatError as exc:
        raise SpecError("members", str(exc)) from None


# -- argument types ------------------------------------------------------------

def parse_n_grid(text: str) -> list[int]:
    """``a:b`` (inclusive), ``a:b:step`` or ``n1,n2,...``; strictly increasing."""
    try:
        if ":" in text:
            parts = [int(t) for t in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            step = parts[2] if len(parts) == 3 else 1
            if step < 1:
                raise ValueError
            grid = list(range(parts[0], parts[1] + 1, step))
        else:
            grid = [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"bad n-grid {text!r}; use a:b, a:b:step or n1,n2,...") from None
    if not grid:
        raise argparse.ArgumentTypeError(f"n-grid {text!r} is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise argparse.ArgumentTypeError(f"n-grid {text!r} must be strictly increasing")
    return grid


def parse_seed(text: str) -> int:
    try:
        seed = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed {text!r} is not decimal or 0x-hex") from None
    if not 0 <= seed < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return seed


# -- commands ------------------------------------------------------------------

def _finite_kernel(path):
    spec = parse_kernel_spec(path)
    if spec.kind == "remark_exponential":
        raise SpecError("kind", "remark_exponential is continuous; use the growth command")
    return spec, build_kernel(spec), spec.dist


def cmd_oracle(args):
    spec, kernel, dist = _finite_kernel(args.kernel)
    res = exact_Tn_moment(kernel, dist, args.n, args.p, absolute=not args.signed,
                          workers=args.workers)
    return res.to_dict(), True, None


def cmd_mc(args):
    spec, kernel, dist = _finite_kernel(args.kernel)
    est = mc_Tn_moment(TableEvaluator(kernel, dist), Sampler.finite(dist), args.n, args.p,
                       absolute=not args.signed, n_samples=args.samples, seed=args.seed,
                       workers=args.workers)
    return est.to_dict(), True, None


def cmd_verify(args):
    spec, kernel, dist = _finite_kernel(args.kernel)
    fn = {1: verify_theorem1, 2: verify_theorem2, 3: verify_theorem3}[args.theorem]
    report = fn(kernel, dist, args.n_grid, args.p, workers=args.workers)

    def table():
        return VERIFY_CSV_COLUMNS, [[r.n, r.exact_moment, r.bound_value, r.ratio]
                                    for r in report.rows]

    return report.to_dict(), not report.violations, table


def cmd_hoeffding(args):
    spec, kernel, dist = _finite_kernel(args.kernel)
    proj = hoeffding_project(kernel, dist)
    comps = [{"order": 0, "value": proj.components[0]}]
    for j, g in enumerate(proj.components[1:], start=1):
        comps.append({"order": j, "entries": {",".join(map(str, key)): v
                                              for key, v in g.entries.items()}})
    out = {"components": comps,
           "reconstruction_residual": proj.reconstruction_residual(),
           "degeneracy_residuals": list(proj.degeneracy_residuals()),
           "provenance": "exact"}
    return out, True, None


def cmd_lemma2(args):
    seq = parse_sequence(args.seq)
    slacks = lemma2_check(seq, args.gamma, args.s, args.p, parts=args.parts)

    def table():
        return LEMMA2_CSV_COLUMNS, [[i, v] for i, v in
                                    enumerate((slacks.part1, slacks.part2, slacks.part3), 1)
                                    if v is not None]

    return {**slacks.to_dict(), "provenance": "exact"}, slacks.ok, table


def cmd_ineq7(args):
    spec, kernel, dist = _finite_kernel(args.kernel)
    ratio = ineq7_check(kernel, dist, args.n, args.k, args.l, args.s)
    return {"ratio": ratio, "provenance": "exact"}, True, None


def cmd_growth(args):
    m, k, p = args.m, args.k, args.p
    if args.kernel:
        spec = parse_kernel_spec(args.kernel)
        if spec.kind != "remark_exponential":
            raise SpecError("kind", "growth needs a remark_exponential kernel")
        m, k, p = spec.m, spec.k, spec.p
    if None in (m, k, p):
        raise UsageError("growth needs --kernel or all of --m, --k, --p")
    template = RemarkKernelParams(m, k, p, args.n_grid[0], a_rule=args.a_rule,
                                  reading=args.reading)
    result = growth_study(template, args.n_grid, args.method, mc_outer=args.mc_outer,
                          mc_inner=args.mc_inner, seed=args.seed)
    out = {**result.to_dict(), "passed": result.passed(args.tol),
           "passed_phi_n": result.passed(args.tol, reading="phi_n"),
           "provenance": "quadrature" if result.metadata["method"] == "quad"
           else "monte_carlo"}
    if result.metadata["method"] != "quad":
        out["seed"] = args.seed

    def table():
        buf = io.StringIO()
        write_growth_csv(result, buf, reading=args.csv_reading)
        rows = list(csv.reader(io.StringIO(buf.getvalue())))
        return GROWTH_CSV_COLUMNS, rows[1:]

    return out, True, table


def cmd_constants(args):
    entries = []
    for path in args.kernel:
        spec, kernel, dist = _finite_kernel(path)
        entries.append((Path(path).stem, kernel, dist))
    res = estimate_constants(entries, args.theorem, args.p, args.n_grid, workers=args.workers)
    return res.to_dict(), True, None


COMMANDS = {"oracle": cmd_oracle, "mc": cmd_mc, "verify": cmd_verify,
            "hoeffding": cmd_hoeffding, "lemma2": cmd_lemma2, "ineq7": cmd_ineq7,
            "growth": cmd_growth, "constants": cmd_constants}


# -- parser --------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="symstat",
                  description="Exact and simulated moments of symmetric statistics.")
    top.add_argument("--version", action="version", version=f"symstat {__version__}")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, workers=True):
        p.add_argument("--output", "-o", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if workers:
            p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("oracle", help="exact E|T_n|^p by count-class enumeration")
    p.add_argument("--kernel", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--signed", action="store_true", help="E T_n^p instead of E|T_n|^p")
    common(p)

    p = sub.add_parser("mc", help="Monte Carlo estimate of E|T_n|^p")
    p.add_argument("--kernel", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=parse_seed, default=0)
    p.add_argument("--signed", action="store_true")
    common(p)

    p = sub.add_parser("verify", help="pair exact moments with a bound expression")
    p.add_argument("--theorem", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--kernel", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--n-grid", type=parse_n_grid, required=True)
    common(p)

    p = sub.add_parser("hoeffding", help="Hoeffding components of a kernel")
    p.add_argument("--kernel", required=True)
    common(p, workers=False)

    p = sub.add_parser("lemma2", help="slacks of the power-sum interpolation inequalities")
    p.add_argument("--seq", required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--parts", type=lambda t: [int(x) for x in t.split(",")])
    common(p, workers=False)

    p = sub.add_parser("ineq7", help="cross-term ratio for nonnegative kernels")
    p.add_argument("--kernel", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    common(p, workers=False)

    p = sub.add_parser("growth", help="growth orders of the counterexample terms")
    p.add_argument("--kernel", help="remark_exponential spec (overrides --m/--k/--p)")
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--n-grid", type=parse_n_grid, default=[8, 16, 32, 64, 128])
    p.add_argument("--method", choices=("auto", "quad", "mc"), default="auto")
    p.add_argument("--a-rule", choices=A_RULES, default="complement")
    p.add_argument("--reading", choices=READINGS, default="exponential")
    p.add_argument("--csv-reading", choices=("display", "phi_n"), default="phi_n")
    p.add_argument("--tol", type=float, default=0.15)
    p.add_argument("--mc-outer", type=int, default=20_000)
    p.add_argument("--mc-inner", type=int, default=200)
    p.add_argument("--seed", type=parse_seed, default=0)
    common(p, workers=False)

    p = sub.add_parser("constants", help="empirical constant envelopes over kernels")
    p.add_argument("--kernel", nargs="+", required=True)
    p.add_argument("--theorem", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--n-grid", type=parse_n_grid, required=True)
    common(p)
    return top


# -- output --------------------------------------------------------------------

def _clean(obj):
    """Replace non-finite floats by ``None`` so the report is strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("command", "output", "format")}
    if "seed" in cfg:
        cfg["seed_hex"] = hex(cfg["seed"])
    budget = os.environ.get("USTAT_BUDGET")
    if budget:
        cfg["USTAT_BUDGET"] = budget
    return cfg


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def render(args, results, table, wall) -> str:
    if args.format == "csv":
        if table is None:
            raise UsageError(f"--format csv is not available for {args.command}")
        columns, rows = table()
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    report = {"command": args.command, "config": _config(args), "results": results,
              "tool_version": __version__, "wall_time": wall}
    return json.dumps(_clean(report), indent=2, allow_nan=False) + "\n"


def run(argv=None) -> int:
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        results, ok, table = COMMANDS[args.command](args)
        text = render(args, results, table, time.perf_counter() - start)
        if args.output:
            Path(args.output).write_text(text)
        else:
            sys.stdout.write(text)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except SymstatError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if not ok:
        print("inequality violation detected", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
