"""Integral operators ``T_g``, ``I_g`` and the multiplier ``M_g``.

The operators act exactly on Taylor coefficients, so algebraic identities
hold to rounding.  Quadrature enters only through the norms used by
:func:`opnorm_lower`.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .quadrature import ParamGrid, Resolution
from .series import (DEFAULT_N, PowerSeries, TestFamilyKind, antiderivative, as_series,
                     build, cauchy_product, derivative, dilate, test_function)
from .spaces import (SpaceError, SpaceSpec, _hardy, _morrey_value, bmoa_seminorm,
                     default_resolution, sup_norm, vmoa_distance_profile)

KINDS = ("Tg", "Ig", "Mg")
MAX_FAMILY_ANGLES = 8


class OperatorError(ValueError):
    pass


@dataclass(frozen=True)
class OperatorSpec:
    kind: str
    g: PowerSeries

    def __post_init__(self):
        if self.kind not in KINDS:
            raise OperatorError(f"unknown operator {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "g", as_series(self.g))

    @classmethod
    def from_json(cls, obj, N: int = DEFAULT_N) -> "OperatorSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        g = obj["g"]
        g = build(g, N) if isinstance(g, str) else PowerSeries.from_json(g)
        return cls(obj["kind"], g)

    def to_json(self) -> dict:
        return {"kind": self.kind, "g": self.g.to_json()}


@dataclass(frozen=True)
class SpacePair:
    """Admissible domain/codomain pairs.

    ``Morrey(lam) -> Morrey(lam)`` for lam in (0, 1) and
    ``Hardy(p) -> Morrey(1 - 2/p)`` for p in [2, inf].  The codomain index
    may reach the end points 0 (``p = 2``) and 1 (``p = inf``, BMOA).
    """

    domain: SpaceSpec
    codomain_lambda: float

    @classmethod
    def morrey(cls, lam: float) -> "SpacePair":
        if not 0.0 < lam < 1.0:
            raise OperatorError(f"λ out of range (0, 1): {lam}")
        return cls(SpaceSpec("morrey", lam), lam)

    @classmethod
    def hardy(cls, p: float) -> "SpacePair":
        if not p >= 2.0:
            raise OperatorError(f"Hardy exponent must lie in [2, inf], got {p}")
        lam = 1.0 if math.isinf(p) else 1.0 - 2.0 / p
        return cls(SpaceSpec("hardy", p), lam)

    @classmethod
    def parse(cls, text: str) -> "SpacePair":
        try:
            spec = SpaceSpec.parse(text)
        except SpaceError as exc:
            raise OperatorError(str(exc)) from None
        if spec.kind == "hardy":
            return cls.hardy(spec.param)
        if spec.kind == "morrey":
            return cls.morrey(spec.param)
        raise OperatorError("admissible pairs: morrey:<lambda in (0,1)> or hardy:<p in [2,inf]>")

    @property
    def is_hardy(self) -> bool:
        return self.domain.kind == "hardy"

    def __str__(self):
        return f"{self.domain} -> morrey:{self.codomain_lambda:g}"


@dataclass(frozen=True)
class OpNormEstimate:
    """Lower bound for an operator norm from a test family sweep.

    ``lower`` is the largest measured ratio ``||op f|| / ||f||``.
    ``unit_bound`` replaces the domain norm by the uniform bound 1 whenever
    the measured norm exceeds it; ``flag`` records that this happened.
    """

    lower: float
    family: str
    argmax: object
    grid: dict
    comparator: float
    unit_bound: float
    flag: bool = False
    refinement_delta: float | None = None
    rows: list = field(default_factory=list, repr=False)

    @property
    def ratio(self) -> float | None:
        if self.comparator == 0.0:
            return None
        return self.lower / self.comparator

    def as_dict(self) -> dict:
        arg = self.argmax
        if isinstance(arg, complex):
            arg = [arg.real, arg.imag]
        return {"lower": self.lower, "family": self.family, "argmax": arg, "grid": self.grid,
                "comparator": self.comparator, "ratio": self.ratio,
                "unit_bound": self.unit_bound, "flag": self.flag,
                "refinement_delta": self.refinement_delta}


# ---------------------------------------------------------------------------

def apply(op: OperatorSpec, f: PowerSeries, cap: int | None = None) -> PowerSeries:
    """``T_g f``, ``I_g f`` or ``M_g f`` on coefficients."""
    f = as_series(f)
    kw = {} if cap is None else {"cap": cap}
    if op.kind == "Tg":
        return antiderivative(cauchy_product(f, derivative(op.g), **kw))
    if op.kind == "Ig":
        return antiderivative(cauchy_product(derivative(f), op.g, **kw))
    return cauchy_product(f, op.g, **kw)


def decomposition_check(g: PowerSeries, f: PowerSeries) -> float:
    """Max coefficient gap in ``M_g f = f(0) g(0) + I_g f + T_g f``."""
    g, f = as_series(g), as_series(f)
    parts = [apply(OperatorSpec(k, g), f).coeffs for k in KINDS]
    n = max(p.size for p in parts)
    m, i, t = (np.pad(p, (0, n - p.size)) for p in (parts[2], parts[1], parts[0]))
    rhs = i + t
    rhs[0] += f.coeffs[0] * g.coeffs[0]
    return float(np.max(np.abs(m - rhs)))


def theorem_comparator(op: OperatorSpec, pair: SpacePair | None = None,
                       res: Resolution | None = None) -> float:
    """``||g||_inf`` for ``Ig``/``Mg``; the BMOA seminorm (Mobius form) for ``Tg``.

    ``T_g`` only sees ``g'``, so the ``|g(0)|`` term is left out and constant
    symbols give ``0``.
    """
    if op.kind == "Tg":
        return bmoa_seminorm(op.g, "mobius", res or default_resolution())[0]
    return sup_norm(op.g, (res or default_resolution()).m)


def default_family(op: OperatorSpec, pair: SpacePair) -> str:
    if pair.is_hardy:
        return "hb" if op.kind == "Tg" else "kernel"
    return "Fb" if op.kind == "Tg" else "fb"


def family_grid(res: Resolution, family: str) -> list[complex]:
    """The ``b`` parameters swept by :func:`opnorm_lower` (at most 8 angles per radius)."""
    grid = ParamGrid.from_resolution(res)
    out = []
    for rho, n in zip(grid.radii, grid.angle_counts):
        if family == "kernel" and rho < 0.5:
            continue
        k = min(n, MAX_FAMILY_ANGLES)
        out.extend(complex(rho * np.exp(2j * np.pi * i / k)) for i in range(k))
    return out


@lru_cache(maxsize=4096)
def domain_norm(f: PowerSeries, pair: SpacePair, res: Resolution) -> float:
    if pair.is_hardy:
        return _hardy(f, pair.domain.param, res)[0]
    return _morrey_value(f, pair.domain.param, res)


def codomain_norm(f: PowerSeries, pair: SpacePair, res: Resolution) -> float:
    return _morrey_value(f, pair.codomain_lambda, res)


def _check_family(family: str, pair: SpacePair):
    ok = ("hb", "kernel", "corpus") if pair.is_hardy else ("fb", "Fb", "corpus")
    if family not in ok:
        raise OperatorError(f"family {family!r} inadmissible for {pair}; admissible: {ok}")


@lru_cache(maxsize=512)
def family_member(family: str, b: complex, param: float, N: int) -> PowerSeries:
    return test_function(TestFamilyKind(family, b, param), N)


@lru_cache(maxsize=512)
def sweep(op: OperatorSpec, pair: SpacePair, family: str, res: Resolution, N: int = DEFAULT_N,
          corpus: tuple = ()) -> tuple:
    """Rows ``(b, ||op f_b||, ||f_b||)`` over the family grid of ``res``."""
    if family == "corpus":
        params = list(range(len(corpus)))
        funcs = list(corpus)
    else:
        params = family_grid(res, family)
        funcs = [family_member(family, b, pair.domain.param, N) for b in params]
    rows = []
    for b, f in zip(params, funcs):
        dom = domain_norm(f, pair, res)
        cod = codomain_norm(apply(op, f), pair, res)
        rows.append((b, cod, dom))
    return tuple(rows)


def opnorm_lower(op: OperatorSpec, pair: SpacePair, family: str | None = None,
                 res: Resolution | None = None, N: int = DEFAULT_N,
                 corpus: Sequence[PowerSeries] = (), refine: bool = True) -> OpNormEstimate:
    """Lower estimate of ``||op||`` on ``pair`` from a test family sweep."""
    res = res or default_resolution()
    family = family or default_family(op, pair)
    _check_family(family, pair)
    if family == "corpus" and not corpus:
        raise OperatorError("corpus family needs at least one function")
    corpus = tuple(as_series(f) for f in corpus)
    lower, arg, capped, flag, rows = _summarise(sweep(op, pair, family, res, N, corpus))
    delta = None
    if refine:
        lower1 = _summarise(sweep(op, pair, family, res.refine(), N, corpus))[0]
        delta = 0.0 if lower1 == lower else abs(lower1 - lower) / max(lower, lower1)
    comp = theorem_comparator(op, pair, res)
    grid = res.as_dict() | {"N": N, "pair": str(pair)}
    return OpNormEstimate(lower, family, arg, grid, comp, capped, flag, delta, rows)


def _summarise(rows):
    lower, arg, capped, flag = 0.0, rows[0][0], 0.0, False
    for b, cod, dom in rows:
        if dom == 0.0:
            continue
        r = cod / dom
        if r > lower:
            lower, arg = r, b
        if dom > 1.0:
            flag = True
        capped = max(capped, cod / min(dom, 1.0))
    return lower, arg, capped, flag, list(rows)


def essential_proxy(op: OperatorSpec, pair: SpacePair, r_levels: Iterable[float] | None = None,
                    res: Resolution | None = None, N: int = DEFAULT_N, family: str | None = None):
    """Dilation proxies for the essential norm of ``T_g``.

    Returns ``{"rows": [(r, ||g - g_r||_BMOA, lower(T_{g - g_r})), ...],
    "profile": vmoa_distance_profile(g)}``.
    """
    if op.kind != "Tg":
        raise OperatorError("essential_proxy is defined for Tg")
    res = res or default_resolution()
    levels = list(r_levels) if r_levels is not None else [1 - 2.0 ** -k for k in range(2, 7)]
    for r in levels:
        if not 0.0 < r < 1.0:
            raise OperatorError(f"r-levels must lie in (0, 1), got {r}")
    family = family or default_family(op, pair)
    rows = []
    for r in levels:
        d = op.g - dilate(op.g, r)
        bm = bmoa_seminorm(d, "mobius", res)[0]
        est = opnorm_lower(OperatorSpec("Tg", d), pair, family, res, N, refine=False)
        rows.append((r, bm, est.lower))
    return {"rows": rows, "profile": vmoa_distance_profile(op.g, res=res)}
