"""Ratio-stability experiments, one per quantitative statement.

Every check produces a :class:`RatioTable`.  Each row holds a measured
quantity and a comparator at the base resolution, the same pair after one
refinement step, and a verdict.  Rows come in a few kinds:

``exact``     identity, ``|m - c| / |c| < tol``
``abs``       ``m <= tol`` (comparator unused)
``upper``     absolute inequality ``m / c <= bound`` at both levels
``stable``    one-sided inequality with an implicit constant: finite and
              refinement drift below 10%
``window``    two-sided equivalence: ratio inside the calibrated window
              (widened by 10%) and drift below 10%
``contrast``  ordering, ``m / c >= bound``
``flag``      verdict computed by the check itself
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .operators import (OperatorSpec, SpacePair, apply, codomain_norm, decomposition_check,
                        default_family, domain_norm, family_grid, family_member, sweep,
                        theorem_comparator)
from .quadrature import DiscRule, ParamGrid, Resolution, integrate_circle, integrate_disc
from .series import (DEFAULT_N, MobiusMap, PowerSeries, build, constant, dilate, geometric,
                     lacunary, monomial, random_polynomial)
from .spaces import (MORREY_FORMS, DensityMeasure, _hardy, _morrey_value, _rule_for,
                     area_measure, bmoa_seminorm, carleson_constant, composition_norm,
                     default_resolution, embedding_integral, garsia_measure, growth_ratio,
                     littlewood_paley_h2, morrey_seminorm_sq, vmoa_distance_profile)

STABLE_DELTA = 0.10
CALIBRATION_DRIFT = 0.25
WINDOW_WIDEN = 1.10
DEGENERATE_TOL = 1e-12
CONTRAST_FACTOR = 5.0

LAMBDAS = (0.25, 0.5, 0.75)
PS = (2.0, 3.0, 4.0, math.inf)
R_LEVELS = tuple(1 - 2.0 ** -k for k in range(2, 7))

PASS_VERDICTS = ("pass", "degenerate-pass")


class VerifyError(ValueError):
    pass


class CalibrationRequired(VerifyError):
    pass


class CalibrationError(VerifyError):
    pass


# ---------------------------------------------------------------------------
# Corpus

@dataclass(frozen=True)
class Corpus:
    name: str
    entries: tuple  # (label, PowerSeries)

    def __post_init__(self):
        if not self.entries:
            raise VerifyError("empty corpus")

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def get(self, label: str) -> PowerSeries:
        for k, f in self.entries:
            if k == label:
                return f
        raise KeyError(label)

    def subset(self, labels: Iterable[str]) -> "Corpus":
        wanted = list(labels)
        return Corpus(self.name, tuple((k, f) for k, f in self.entries if k in wanted))


def lacunary_pair(K: int = 8, N: int = DEFAULT_N) -> tuple[PowerSeries, PowerSeries]:
    """``sum_{k<=K} z^{2^k}`` and ``sum_{k<=K} 2^{-k} z^{2^k}``."""
    return lacunary([1.0] * (K + 1), N), lacunary([2.0 ** -k for k in range(K + 1)], N)


def standard_corpus(N: int = DEFAULT_N, seed: int = 0) -> Corpus:
    lac, dec = lacunary_pair(8, N)
    half = PowerSeries(np.array([0.5, 0.5]))
    entries = [
        ("const", constant(1.0)),
        ("z", monomial(1)),
        ("z2", monomial(2)),
        ("z5", monomial(5)),
        ("geo0.3", geometric(0.3, N)),
        ("geo0.6", geometric(0.6, N)),
        ("geo0.9", geometric(0.9, N)),
        ("lac", lac),
        ("lacdec", dec),
        ("pow1", half),
        ("pow3", half * half * half),
        ("pow8", _power(half, 8)),
        (f"rand{seed}", random_polynomial(16, seed)),
    ]
    return Corpus("standard", tuple(entries))


def _power(f: PowerSeries, m: int) -> PowerSeries:
    out = constant(1.0)
    for _ in range(m):
        out = out * f
    return out


# symbol lists used by the operator checks (labels of the standard corpus)
SYMBOLS = ("zero", "const", "z", "z5", "geo0.6", "pow3", "lac")
UPPER_F = ("const", "z", "z5", "geo0.6", "lac", "pow8")


def _symbol(corpus: Corpus, label: str) -> PowerSeries:
    return constant(0.0) if label == "zero" else corpus.get(label)


# ---------------------------------------------------------------------------
# Tables

@dataclass(frozen=True)
class RawRow:
    row: str
    param: str
    m0: float
    c0: float
    m1: float
    c1: float
    kind: str
    bound: float | None = None
    ok: bool | None = None


@dataclass(frozen=True)
class Row:
    check: str
    row: str
    param: str
    measured: float
    comparator: float
    ratio: float | None
    delta: float | None
    verdict: str


CSV_COLUMNS = ("check", "row", "param", "measured", "comparator", "ratio", "delta", "verdict")


@dataclass
class RatioTable:
    check: str
    params: dict
    rows: list
    grid: dict = field(default_factory=dict)

    def __post_init__(self):
        for r in self.rows:
            for v in (r.measured, r.comparator):
                if not math.isfinite(v):
                    raise VerifyError(f"{self.check}: non-finite value in row {r.row}")

    @property
    def passed(self) -> bool:
        return all(r.verdict in PASS_VERDICTS for r in self.rows)

    @property
    def stable(self) -> bool:
        return all(r.delta is None or r.delta < STABLE_DELTA for r in self.rows)

    def summary(self) -> dict:
        ratios = [r.ratio for r in self.rows if r.ratio is not None]
        counts: dict = {}
        for r in self.rows:
            counts[r.verdict] = counts.get(r.verdict, 0) + 1
        return {"rows": len(self.rows), "min_ratio": min(ratios) if ratios else None,
                "max_ratio": max(ratios) if ratios else None, "stable": self.stable,
                "passed": self.passed, "verdicts": counts}

    def failures(self) -> list:
        return [r for r in self.rows if r.verdict not in PASS_VERDICTS]

    def csv_rows(self) -> list:
        return [[r.check, r.row, r.param, _num(r.measured), _num(r.comparator), _num(r.ratio),
                 _num(r.delta), r.verdict] for r in self.rows]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(CSV_COLUMNS)
        w.writerows(self.csv_rows())
        return buf.getvalue()

    def as_dict(self) -> dict:
        return {"check": self.check, "params": self.params, "grid": self.grid,
                "rows": [dict(zip(CSV_COLUMNS, [r.check, r.row, r.param, r.measured,
                                                r.comparator, r.ratio, r.delta, r.verdict]))
                         for r in self.rows],
                "summary": self.summary()}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _num(x) -> str:
    return "" if x is None else repr(float(x))


def _ratio(m: float, c: float) -> float | None:
    return None if c == 0.0 else m / c


def _drift(a: float | None, b: float | None) -> float | None:
    if a is None or b is None:
        return None
    if a == b:
        return 0.0
    return abs(b - a) / max(abs(a), abs(b))


def _finish(check: str, raw: RawRow, windows: dict | None) -> Row:
    r0, r1 = _ratio(raw.m0, raw.c0), _ratio(raw.m1, raw.c1)
    delta = _drift(r0, r1)
    verdict = _verdict(check, raw, r0, r1, delta, windows)
    return Row(check, raw.row, raw.param, float(raw.m0), float(raw.c0), r0, delta, verdict)


def _verdict(check, raw, r0, r1, delta, windows):
    kind = raw.kind
    if kind == "flag":
        return "pass" if raw.ok else "violation"
    if kind == "abs":
        return "pass" if raw.m0 <= raw.bound and raw.m1 <= raw.bound else "violation"
    if raw.c0 == 0.0 or raw.c1 == 0.0:
        if abs(raw.m0) <= DEGENERATE_TOL and abs(raw.m1) <= DEGENERATE_TOL:
            return "degenerate-pass"
        return "violation"
    if not (math.isfinite(r0) and math.isfinite(r1)):
        return "violation"
    if kind == "exact":
        ok = abs(raw.m0 - raw.c0) <= raw.bound * abs(raw.c0) and \
            abs(raw.m1 - raw.c1) <= raw.bound * abs(raw.c1)
        return "pass" if ok else "violation"
    if kind == "upper":
        return "pass" if r0 <= raw.bound and r1 <= raw.bound else "violation"
    if kind == "contrast":
        return "pass" if r0 >= raw.bound and r1 >= raw.bound else "violation"
    if kind == "stable":
        if raw.bound is not None and not (r0 > raw.bound and r1 > raw.bound):
            return "violation"
        return "pass" if delta < STABLE_DELTA else "unstable"
    if kind == "window":
        if windows is None:
            raise CalibrationRequired(f"calibration required for check {check!r}")
        try:
            lo, hi = windows[check][raw.param]
        except KeyError:
            raise CalibrationRequired(
                f"calibration file has no window for {check} [{raw.param}]") from None
        if delta >= STABLE_DELTA:
            return "unstable"
        inside = lo / WINDOW_WIDEN <= r0 <= hi * WINDOW_WIDEN
        return "pass" if inside else "out-of-window"
    raise VerifyError(f"unknown row kind {kind!r}")


# ---------------------------------------------------------------------------
# Context

@dataclass(frozen=True)
class Context:
    res: Resolution
    N: int = DEFAULT_N
    seed: int = 0
    threads: int = 1
    corpus: Corpus | None = None

    @property
    def fine(self) -> Resolution:
        return self.res.refine()

    @property
    def standard(self) -> Corpus:
        return self.corpus or standard_corpus(self.N, self.seed)

    def map(self, fn: Callable, items) -> list:
        items = list(items)
        if self.threads <= 1 or len(items) < 2:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.threads) as ex:
            return list(ex.map(fn, items))


def _both(ctx: Context, fn: Callable[[Resolution], tuple]) -> tuple:
    m0, c0 = fn(ctx.res)
    m1, c1 = fn(ctx.fine)
    return m0, c0, m1, c1


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:g}"


# ---------------------------------------------------------------------------
# Checks

def check_lp(ctx: Context, **_) -> list:
    funcs = [(f"z^{n}", monomial(n)) for n in range(1, 17)]
    funcs.append(("const2.5", constant(2.5)))
    funcs += [(f"rand{d}:{ctx.seed + i}", random_polynomial(d, ctx.seed + i))
              for i, d in enumerate((8, 16, 32))]

    def row(item):
        label, f = item
        m0, c0, m1, c1 = _both(ctx, lambda r: littlewood_paley_h2(f, r)[::-1])
        return RawRow(label, "", m0, c0, m1, c1, "exact", 1e-8)

    return ctx.map(row, funcs)


FORM_PAIRS = (("mobius", "box"), ("log", "box"), ("boundary", "box"), ("log", "mobius"))


def check_lem1(ctx: Context, lam: float = 0.5, **_) -> list:
    _require_lambda(lam)
    out = []

    def rows_for(item):
        label, f = item
        rows = []
        semi = {}
        for res in (ctx.res, ctx.fine):
            semi[res] = {form: math.sqrt(max(morrey_seminorm_sq(f, lam, form, res)[0], 0.0))
                         for form in MORREY_FORMS}
        for a, b in FORM_PAIRS:
            s0, s1 = semi[ctx.res], semi[ctx.fine]
            rows.append(RawRow(label, f"lam={_fmt(lam)};{a}/{b}", s0[a], s0[b], s1[a], s1[b],
                               "window"))
        return rows

    for rows in ctx.map(rows_for, ctx.standard):
        out.extend(rows)
    return out


def check_lem2(ctx: Context, lam: float = 0.5, **_) -> list:
    _require_lambda(lam)
    items = list(ctx.standard)
    items += [(f"Fb:{_b(b)}", family_member("Fb", b, lam, ctx.N))
              for b in family_grid(ctx.res, "Fb") if b.imag == 0 and b.real >= 0]

    def row(item):
        label, f = item
        g0 = growth_ratio(f, lam, ctx.res)
        g1 = growth_ratio(f, lam, ctx.fine)
        return RawRow(label, f"lam={_fmt(lam)}", g0, 1.0, g1, 1.0, "stable", 0.0)

    return ctx.map(row, items)


def _b(b: complex) -> str:
    return f"{b.real:.6g}{b.imag:+.6g}j"


LEM3_TRIPLES = ((0.0, 3.0, 1.0), (1.0, 4.0, 2.0), (-0.5, 2.0, 1.0), (1.0, 4.5, 2.0))
LEM3_POINTS = (0.0, 0.5, 0.75j, -0.875, 0.9375 * np.exp(0.25j * np.pi))


def check_lem3(ctx: Context, **_) -> list:
    items = [(t, a, b) for t in LEM3_TRIPLES for a in LEM3_POINTS for b in LEM3_POINTS]

    def value(res, s, r, t, a, b):
        rule = _rule_for(res)

        def density(z):
            return (1 - np.abs(z) ** 2) ** s / (np.abs(1 - np.conj(b) * z) ** r
                                                * np.abs(1 - np.conj(a) * z) ** t)

        lhs = float(np.real(integrate_disc(rule, density)))
        rhs = (1 - abs(b) ** 2) ** (-(r - s - 2)) * abs(1 - np.conj(a) * b) ** (-t)
        return lhs, rhs

    def row(item):
        (s, r, t), a, b = item
        a, b = complex(a), complex(b)
        m0, c0, m1, c1 = _both(ctx, lambda res: value(res, s, r, t, a, b))
        return RawRow(f"a={_b(a)};b={_b(b)}", f"s={_fmt(s)};r={_fmt(r)};t={_fmt(t)}",
                      m0, c0, m1, c1, "stable")

    return ctx.map(row, items)


def check_lem4(ctx: Context, lam: float = 0.5, **_) -> list:
    _require_lambda(lam)
    items = [(fam, b) for fam in ("fb", "Fb") for b in family_grid(ctx.res, fam)
             if b.imag == 0 and b.real >= 0]

    def row(item):
        fam, b = item
        f = family_member(fam, b, lam, ctx.N)
        return RawRow(f"{fam}:{_b(b)}", f"lam={_fmt(lam)}", _morrey_value(f, lam, ctx.res), 1.0,
                      _morrey_value(f, lam, ctx.fine), 1.0, "stable", 0.0)

    return ctx.map(row, items)


def check_lem5(ctx: Context, **_) -> list:
    r_star = R_LEVELS[-1]

    def row(label):
        g = _symbol(ctx.standard, label)
        d = g - dilate(g, r_star)

        def at(res):
            prof = vmoa_distance_profile(g, res=res)
            return bmoa_seminorm(d, "mobius", res)[0], prof[-1][1]

        m0, c0, m1, c1 = _both(ctx, at)
        return RawRow(label, f"r={r_star:g}", m0, c0, m1, c1, "window")

    return ctx.map(row, SYMBOLS[1:])


THMA_MEASURES = ("area", "weight1", "mu_z5", "mu_geo0.6")


def _measure(name: str, corpus: Corpus) -> DensityMeasure:
    if name == "area":
        return area_measure()
    if name == "weight1":
        return DensityMeasure(fn=lambda z: 1 - np.abs(z) ** 2, label="1-|z|^2")
    return garsia_measure(corpus.get(name[3:]))


def check_thmA(ctx: Context, **_) -> list:
    items = [(m, label) for m in THMA_MEASURES for label, _ in ctx.standard]

    def row(item):
        mname, label = item
        mu = _measure(mname, ctx.standard)
        f = ctx.standard.get(label)

        def at(res):
            c = carleson_constant(mu, 1.0, res, refine=False).value
            return embedding_integral(f, mu, res), c * _hardy(f, 2.0, res)[0] ** 2

        m0, c0, m1, c1 = _both(ctx, at)
        return RawRow(label, f"mu={mname}", m0, c0, m1, c1, "stable")

    return ctx.map(row, items)


def check_thmB(ctx: Context, **_) -> list:
    def row(item):
        label, g = item
        m0, c0, m1, c1 = _both(ctx, lambda res: (bmoa_seminorm(g, "garsia", res)[0],
                                                bmoa_seminorm(g, "mobius", res)[0]))
        return RawRow(label, "garsia/mobius", m0, c0, m1, c1, "window")

    return ctx.map(row, ctx.standard)


CM_PS = (2.0, 3.0, 4.0)
CM_F = ("const", "z", "z5", "geo0.6", "pow8", "lacdec")


def check_cm(ctx: Context, **_) -> list:
    items = [(label, p) for p in CM_PS for label in CM_F]

    def worst(f, p, res):
        norm = _hardy(f, p, res)[0]
        pts = ParamGrid.from_resolution(res).points()
        best = (-1.0, 0.0, 1.0)
        for a in pts:
            lhs = composition_norm(f, a, p, res.m)
            rhs = ((1 + abs(a)) / (1 - abs(a))) ** (1 / p) * norm
            if lhs / rhs > best[0]:
                best = (lhs / rhs, lhs, rhs)
        return best[1], best[2]

    def row(item):
        label, p = item
        f = ctx.standard.get(label)
        m0, c0, m1, c1 = _both(ctx, lambda res: worst(f, p, res))
        return RawRow(label, f"p={_fmt(p)}", m0, c0, m1, c1, "upper", 1 + 1e-6)

    return ctx.map(row, items)


KERNEL_TS = (0.5, 1.0, 2.0)


def check_kernel(ctx: Context, **_) -> list:
    radii = [r for r in ParamGrid.from_resolution(ctx.res).radii if r > 0]
    items = [(t, r) for t in KERNEL_TS for r in radii]

    def row(item):
        t, r = item

        def at(res):
            lhs = integrate_circle(lambda w: np.abs(1 - w) ** (-(1 + t)), r, res.m)
            return float(np.real(lhs)), (1 - r * r) ** (-t)

        m0, c0, m1, c1 = _both(ctx, at)
        return RawRow(f"|z|={r:g}", f"t={_fmt(t)}", m0, c0, m1, c1, "stable")

    return ctx.map(row, items)


def check_boxweight(ctx: Context, **_) -> list:
    lengths = [h for h in ParamGrid.from_resolution(ctx.res).lengths if h < 1.0]
    items = [(h, th) for h in lengths for th in (0.0, 2.0)]

    def value(res, h, th):
        rule = DiscRule.from_resolution(res, extra_breaks=[1 - h])
        r = rule.nodes[rule.nodes >= 1 - h]
        ang = rule.angles
        d = np.angle(np.exp(1j * (ang - th)))
        ang = ang[np.abs(d) <= np.pi * h]
        z = np.outer(r, np.exp(1j * ang)).ravel()
        b = (1 - h) * np.exp(1j * th)
        s = MobiusMap(b)(z)
        vals = (1 - np.abs(s) ** 2) * h / (1 - np.abs(z) ** 2)
        return float(vals.min()), 1.0

    def row(item):
        h, th = item
        m0, c0, m1, c1 = _both(ctx, lambda res: value(res, h, th))
        return RawRow(f"h={h:g};theta={th:g}", "min", m0, c0, m1, c1, "stable", 0.0)

    return ctx.map(row, items)


# -- operator checks ----------------------------------------------------------

def _op_rows(ctx: Context, kind: str, pair: SpacePair, param: str, family: str | None = None,
             symbols=SYMBOLS, shell: bool = False) -> list:
    def row(label):
        op = OperatorSpec(kind, _symbol(ctx.standard, label))
        fam = family or default_family(op, pair)

        def at(res):
            rows = sweep(op, pair, fam, res, ctx.N)
            if shell:
                rmax = max(abs(b) for b, _, _ in rows)
                rows = [x for x in rows if abs(abs(x[0]) - rmax) < 1e-12]
            lower = max((cod / dom for _, cod, dom in rows if dom > 0), default=0.0)
            return lower, theorem_comparator(op, pair, ctx.res)

        m0, c0, m1, c1 = _both(ctx, at)
        return RawRow(f"g={label}", param, m0, c0, m1, c1, "window")

    return ctx.map(row, symbols)


def _upper_rows(ctx: Context, pair: SpacePair, param: str) -> list:
    items = [(g, f) for g in SYMBOLS for f in UPPER_F]

    def row(item):
        gl, fl = item
        g, f = _symbol(ctx.standard, gl), ctx.standard.get(fl)
        op = OperatorSpec("Ig", g)
        img = apply(op, f)

        def at(res):
            return (codomain_norm(img, pair, res),
                    theorem_comparator(op, pair, ctx.res) * domain_norm(f, pair, res))

        m0, c0, m1, c1 = _both(ctx, at)
        return RawRow(f"g={gl};f={fl}", f"{param};upper", m0, c0, m1, c1, "upper", 1 + 1e-3)

    return ctx.map(row, items)


def check_thm1(ctx: Context, lam: float = 0.5, **_) -> list:
    pair = SpacePair.morrey(_require_lambda(lam))
    param = f"lam={_fmt(lam)}"
    return _op_rows(ctx, "Ig", pair, param) + _upper_rows(ctx, pair, param)


def check_thm2(ctx: Context, lam: float = 0.5, **_) -> list:
    pair = SpacePair.morrey(_require_lambda(lam))
    return _op_rows(ctx, "Tg", pair, f"lam={_fmt(lam)}")


def check_thm3(ctx: Context, p: float = 4.0, **_) -> list:
    pair = SpacePair.hardy(_require_p(p))
    return _op_rows(ctx, "Ig", pair, f"p={_fmt(p)}")


def check_thm4(ctx: Context, p: float = 4.0, **_) -> list:
    pair = SpacePair.hardy(_require_p(p))
    return _op_rows(ctx, "Tg", pair, f"p={_fmt(p)}")


def check_thm5(ctx: Context, lam: float = 0.5, **_) -> list:
    pair = SpacePair.morrey(_require_lambda(lam))
    return _op_rows(ctx, "Ig", pair, f"lam={_fmt(lam)};shell", shell=True)


def check_thm7(ctx: Context, p: float = 4.0, **_) -> list:
    pair = SpacePair.hardy(_require_p(p))
    return _op_rows(ctx, "Ig", pair, f"p={_fmt(p)};shell", shell=True)


ESS_SYMBOLS = ("const", "z", "z5", "geo0.6", "lac", "lacdec")
POLY_SYMBOLS = ("z", "z5")


def _essential_rows(ctx: Context, pair: SpacePair, param: str) -> list:
    """Dilation proxies versus the VMOA distance profile, plus contrast rows."""

    def columns(label, res):
        g = _symbol(ctx.standard, label)
        prof = vmoa_distance_profile(g, res=res)[-1][1]
        cols = [bmoa_seminorm(g - dilate(g, r), "mobius", res)[0] for r in R_LEVELS]
        # the operator column is only needed at the deepest level
        op = OperatorSpec("Tg", g - dilate(g, R_LEVELS[-1]))
        rows = sweep(op, pair, default_family(op, pair), res, ctx.N)
        lower = max((cod / dom for _, cod, dom in rows if dom > 0), default=0.0)
        return prof, cols, lower

    data = dict(zip(ESS_SYMBOLS, ctx.map(lambda s: (columns(s, ctx.res), columns(s, ctx.fine)),
                                         ESS_SYMBOLS)))
    out = []
    for label in ESS_SYMBOLS:
        (p0, c0, o0), (p1, c1, o1) = data[label]
        out.append(RawRow(f"g={label}", f"{param};bmoa-dilation/profile",
                          c0[-1], p0, c1[-1], p1, "window"))
        out.append(RawRow(f"g={label}", f"{param};op-dilation/profile", o0, p0, o1, p1, "window"))
    for label in POLY_SYMBOLS:
        (_, c0, _), (_, c1, _) = data[label]
        mono = all(np.all(np.diff(cols) <= 1e-15) for cols in (c0, c1))
        out.append(RawRow(f"g={label}", f"{param};monotone", c0[-1], c0[0], c1[-1], c1[0],
                          "flag", ok=bool(mono)))
    (lp0, lc0, lo0), (lp1, lc1, lo1) = data["lac"]
    (dp0, dc0, do0), (dp1, dc1, do1) = data["lacdec"]
    out.append(RawRow("lac/lacdec", f"{param};contrast-profile", lp0, dp0, lp1, dp1,
                      "contrast", CONTRAST_FACTOR))
    out.append(RawRow("lac/lacdec", f"{param};contrast-bmoa-dilation", lc0[-1], dc0[-1],
                      lc1[-1], dc1[-1], "contrast", CONTRAST_FACTOR))
    out.append(RawRow("lac/lacdec", f"{param};contrast-op-dilation", lo0, do0, lo1, do1,
                      "contrast", CONTRAST_FACTOR))
    return out


def check_thm6(ctx: Context, lam: float = 0.5, **_) -> list:
    return _essential_rows(ctx, SpacePair.morrey(_require_lambda(lam)), f"lam={_fmt(lam)}")


def check_thm8(ctx: Context, p: float = 4.0, **_) -> list:
    return _essential_rows(ctx, SpacePair.hardy(_require_p(p)), f"p={_fmt(p)}")


def _decomposition_rows(ctx: Context) -> list:
    items = [(g, f) for g in SYMBOLS for f in UPPER_F]

    def row(item):
        gl, fl = item
        v = decomposition_check(_symbol(ctx.standard, gl), ctx.standard.get(fl))
        return RawRow(f"g={gl};f={fl}", "decomposition", v, 0.0, v, 0.0, "abs", 1e-12)

    return [row(x) for x in items]


def check_cor1(ctx: Context, lam: float = 0.5, **_) -> list:
    pair = SpacePair.morrey(_require_lambda(lam))
    return _op_rows(ctx, "Mg", pair, f"lam={_fmt(lam)}") + _decomposition_rows(ctx)


def check_cor2(ctx: Context, p: float = 4.0, **_) -> list:
    pair = SpacePair.hardy(_require_p(p))
    return _op_rows(ctx, "Mg", pair, f"p={_fmt(p)}")


def _require_lambda(lam: float) -> float:
    if not 0.0 < lam < 1.0:
        raise VerifyError(f"λ out of range (0, 1): {lam}")
    return lam


def _require_p(p: float) -> float:
    if not p >= 2.0:
        raise VerifyError(f"Hardy exponent must lie in [2, inf], got {p}")
    return p


# name -> (function, parameter name or None, windowed)
CHECKS: dict = {
    "lp": (check_lp, None, False),
    "lem1": (check_lem1, "lam", True),
    "lem2": (check_lem2, "lam", False),
    "lem3": (check_lem3, None, False),
    "lem4": (check_lem4, "lam", False),
    "lem5": (check_lem5, None, True),
    "thmA": (check_thmA, None, False),
    "thmB": (check_thmB, None, True),
    "cm": (check_cm, None, False),
    "kernel": (check_kernel, None, False),
    "boxweight": (check_boxweight, None, False),
    "thm1": (check_thm1, "lam", True),
    "thm2": (check_thm2, "lam", True),
    "thm3": (check_thm3, "p", True),
    "thm4": (check_thm4, "p", True),
    "thm5": (check_thm5, "lam", True),
    "thm6": (check_thm6, "lam", True),
    "thm7": (check_thm7, "p", True),
    "thm8": (check_thm8, "p", True),
    "cor1": (check_cor1, "lam", True),
    "cor2": (check_cor2, "p", True),
}

# parameter sweeps used when none is given
DEFAULT_SWEEP = {"lam": LAMBDAS, "p": PS}
SINGLE_DEFAULT = {"thm6": (0.5,), "thm8": (4.0,)}


def check_names() -> list:
    return list(CHECKS)


def is_windowed(name: str) -> bool:
    return CHECKS[name][2]


def param_values(name: str, lam=None, p=None) -> list:
    fn, key, _ = CHECKS[name]
    if key is None:
        return [None]
    given = lam if key == "lam" else p
    if given is not None:
        return [given]
    return list(SINGLE_DEFAULT.get(name, DEFAULT_SWEEP[key]))


def raw_rows(name: str, ctx: Context, value=None) -> list:
    if name not in CHECKS:
        raise VerifyError(f"unknown check {name!r}; expected one of {check_names()} or 'all'")
    fn, key, _ = CHECKS[name]
    kwargs = {} if key is None else {key: value}
    rows = fn(ctx, **kwargs)
    if not rows:
        raise VerifyError(f"{name}: no applicable corpus rows")
    return rows


def check(name: str, ctx: Context, windows: dict | None = None, lam=None, p=None,
          raws: dict | None = None) -> RatioTable:
    """Run one check over its parameter values and assemble the table."""
    fn, key, windowed = CHECKS[name] if name in CHECKS else (None, None, None)
    if fn is None:
        raise VerifyError(f"unknown check {name!r}; expected one of {check_names()} or 'all'")
    if windowed and windows is None:
        raise CalibrationRequired(f"calibration required for check {name!r}")
    rows = []
    values = param_values(name, lam, p)
    for v in values:
        rr = raws[(name, v)] if raws and (name, v) in raws else raw_rows(name, ctx, v)
        rows.extend(_finish(name, r, windows) for r in rr)
    params = {} if key is None else {key: [_fmt(v) for v in values]}
    grid = ctx.res.as_dict() | {"N": ctx.N, "seed": ctx.seed}
    return RatioTable(name, params, rows, grid)


# ---------------------------------------------------------------------------
# Calibration

def calibrate(ctx: Context, names: Iterable[str] | None = None, lam=None, p=None):
    """Equivalence windows from two refinement levels.

    Returns ``(windows_document, raws)``; ``raws`` can be passed to
    :func:`check` to reuse the computation.
    """
    names = [n for n in (names or check_names()) if is_windowed(n)]
    if ctx.corpus is not None and len(ctx.corpus) == 0:
        raise VerifyError("empty corpus")
    windows: dict = {}
    raws: dict = {}
    for name in names:
        for v in param_values(name, lam, p):
            rr = raw_rows(name, ctx, v)
            raws[(name, v)] = rr
            for r in rr:
                if r.kind != "window":
                    continue
                r0, r1 = _ratio(r.m0, r.c0), _ratio(r.m1, r.c1)
                if r0 is None or r1 is None:
                    continue
                d = _drift(r0, r1)
                if d > CALIBRATION_DRIFT:
                    raise CalibrationError(
                        f"refinement drift {d:.1%} > {CALIBRATION_DRIFT:.0%} in {name} "
                        f"row {r.row} [{r.param}]")
                lo, hi = windows.setdefault(name, {}).get(r.param, (math.inf, -math.inf))
                windows[name][r.param] = (min(lo, r0, r1), max(hi, r0, r1))
    doc = {"version": 1,
           "grid": ctx.res.as_dict() | {"N": ctx.N, "seed": ctx.seed},
           "corpus": ctx.standard.name,
           "windows": {k: {q: [float(a), float(b)] for q, (a, b) in sorted(v.items())}
                       for k, v in sorted(windows.items())}}
    return doc, raws


def dump_windows(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def load_windows(text: str, ctx: Context | None = None) -> dict:
    try:
        doc = json.loads(text)
        wins = doc["windows"]
    except (ValueError, KeyError, TypeError) as exc:
        raise VerifyError(f"malformed calibration file: {exc}") from None
    if ctx is not None:
        grid = ctx.res.as_dict() | {"N": ctx.N, "seed": ctx.seed}
        if doc.get("grid") != grid:
            raise VerifyError(f"calibration grid {doc.get('grid')} does not match run grid {grid}")
    return {k: {q: tuple(v) for q, v in rows.items()} for k, rows in wins.items()}


def run(names: Iterable[str], ctx: Context, windows: dict | None = None, lam=None, p=None,
        raws: dict | None = None) -> list:
    return [check(n, ctx, windows, lam, p, raws) for n in names]
