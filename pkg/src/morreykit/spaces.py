"""Norm functionals on Hardy, BMOA and analytic Morrey spaces.

Every norm here is a supremum over a parameter family (radii, disc points
``a`` or boundary arcs ``I``) and is evaluated as a maximum over a
:class:`~morreykit.quadrature.ParamGrid`.  The argmax is always returned so
that maxima sitting on the edge of the grid are visible.

Morrey seminorms come in four equivalent forms:

``box``       sup_I |I|^{-lam} int_{S(I)} |f'|^2 (1 - |z|^2) dA
``mobius``    sup_a (1-|a|^2)^{1-lam} int_D |f'|^2 (1 - |sigma_a|^2) dA
``log``       sup_a (1-|a|^2)^{1-lam} int_D |f'|^2 log(1/|sigma_a|) dA
``boundary``  sup_I |I|^{-lam} (1/2pi) int_I |f - f_I|^2 |dzeta|

and the reported norm is ``|f(0)| + sqrt(seminorm^2)``.  The box form is the
canonical one.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .quadrature import (DiscRule, ParamGrid, QuadratureError, Resolution, abs2_modes,
                         arc_kernel, box_integrals_all, first_argmax, integrate_disc,
                         sampled_modes, power_table, _fft_len)
from .series import PowerSeries, as_series, cauchy_product, derivative, evaluate, evaluate_circle

MORREY_FORMS = ("box", "mobius", "log", "boundary")
BMOA_FORMS = ("mobius", "garsia")
_TINY = 1e-300


class SpaceError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Types

@dataclass(frozen=True)
class SpaceSpec:
    """``hardy`` (``param`` = p in [2, inf]), ``morrey`` (lambda in (0, 1]) or ``bmoa``."""

    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind == "hardy":
            if self.param is None or not self.param >= 2.0:
                raise SpaceError(f"Hardy exponent must lie in [2, inf], got {self.param}")
        elif self.kind == "morrey":
            if self.param is None or not 0.0 < self.param <= 1.0:
                raise SpaceError(f"λ out of range (0, 1]: {self.param}")
            if self.param == 1.0:
                object.__setattr__(self, "kind", "bmoa")
                object.__setattr__(self, "param", None)
        elif self.kind != "bmoa":
            raise SpaceError(f"unknown space {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "SpaceSpec":
        head, _, arg = text.strip().partition(":")
        head = head.lower()
        if head == "bmoa":
            return cls("bmoa")
        if not arg:
            raise SpaceError(f"space {text!r} needs a parameter, e.g. hardy:2 or morrey:0.5")
        try:
            val = math.inf if arg.lower() in ("inf", "infinity", "oo") else float(arg)
        except ValueError:
            raise SpaceError(f"cannot parse space parameter {arg!r}") from None
        if head == "morrey" and not 0.0 < val <= 1.0:
            raise SpaceError(f"λ out of range (0, 1]: {val}")
        return cls(head, val)

    def __str__(self):
        if self.kind == "bmoa":
            return "bmoa"
        p = "inf" if self.param is not None and math.isinf(self.param) else f"{self.param:g}"
        return f"{self.kind}:{p}"


@dataclass(frozen=True)
class NormReport:
    """A norm value together with how it was obtained."""

    value: float
    form: str
    argmax: object
    grid: dict
    refinement_delta: float | None = None
    seminorm: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "value": float(self.value),
            "form": self.form,
            "argmax": _jsonable(self.argmax),
            "grid": self.grid,
            "refinement_delta": self.refinement_delta,
            "seminorm": self.seminorm,
            "diagnostics": {k: _jsonable(v) for k, v in self.diagnostics.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)

    CSV_HEADER = ("value", "form", "argmax", "seminorm", "refinement_delta", "grid")

    def csv_row(self) -> list:
        arg = _jsonable(self.argmax)
        return [repr(self.value), self.form, json.dumps(arg), repr(self.seminorm),
                repr(self.refinement_delta), json.dumps(self.grid, sort_keys=True)]


def _jsonable(x):
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if hasattr(x, "theta0") and hasattr(x, "h"):
        return {"theta0": float(x.theta0), "h": float(x.h)}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _delta(v0: float, v1: float) -> float:
    if v0 == v1:
        return 0.0
    return abs(v1 - v0) / max(abs(v0), abs(v1), _TINY)


@dataclass(frozen=True, eq=False)
class DensityMeasure:
    """Measure ``density(z) dA(z)`` on the disc.

    Either a pointwise callable, or ``|p(z)|^2 w(|z|)`` for a power series
    ``p`` and a radial weight ``w`` (for which angular integration is exact).
    """

    fn: Callable | None = None
    analytic: PowerSeries | None = None
    radial: Callable | None = None
    label: str = ""

    @classmethod
    def from_analytic(cls, p: PowerSeries, radial: Callable | None = None, label="") -> "DensityMeasure":
        return cls(analytic=as_series(p), radial=radial, label=label)

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        if self.analytic is not None:
            w = self.radial(np.abs(z)) if self.radial is not None else 1.0
            return np.abs(evaluate_fast_grid(self.analytic, z)) ** 2 * w
        return np.asarray(self.fn(z), dtype=float)

    def modes(self, rule: DiscRule) -> np.ndarray:
        if self.analytic is not None:
            A = abs2_modes(self.analytic.coeffs, rule.nodes)
            if self.radial is not None:
                A = A * self.radial(rule.nodes)[:, None]
            return A
        vals = np.broadcast_to(np.asarray(self.fn(rule.points()), dtype=float),
                               (rule.nodes.size, rule.m))
        if not np.all(np.isfinite(vals)):
            i, k = np.argwhere(~np.isfinite(vals))[0]
            raise QuadratureError(f"density not finite at node r={rule.nodes[i]!r}, "
                                  f"theta={rule.angles[k]!r}")
        if np.any(vals < 0):
            raise SpaceError("density must be non-negative")
        return sampled_modes(vals)

    def weighted_by(self, f: PowerSeries) -> "DensityMeasure":
        """The measure ``|f|^2 d mu``."""
        f = as_series(f)
        if self.analytic is not None:
            return DensityMeasure(analytic=cauchy_product(self.analytic, f, cap=10 ** 6),
                                  radial=self.radial, label=self.label)
        outer = self

        class _Weighted(DensityMeasure):
            def modes(self, rule):
                fv = evaluate_circle(f, rule.nodes, max(rule.m, f.degree + 1))
                if fv.shape[1] != rule.m:
                    raise SpaceError("angular resolution below the degree of f")
                mu = np.asarray(outer.fn(rule.points()), dtype=float)
                return sampled_modes(np.abs(fv) ** 2 * mu)

        return _Weighted(fn=lambda z: np.abs(evaluate_fast_grid(f, z)) ** 2 * outer.fn(z),
                         label=f"|f|^2 {self.label}")


def evaluate_fast_grid(f: PowerSeries, z):
    from .series import evaluate_fast
    return evaluate_fast(f, z)


def area_measure() -> DensityMeasure:
    return DensityMeasure(fn=lambda z: np.ones(np.shape(z)), label="area")


def garsia_measure(f: PowerSeries) -> DensityMeasure:
    """``d mu_f = |f'(z)|^2 (1 - |z|^2) dA``."""
    return DensityMeasure.from_analytic(derivative(as_series(f)), lambda r: 1.0 - r ** 2,
                                        label="mu_f")


# ---------------------------------------------------------------------------
# Shared machinery

def default_resolution(N: int | None = None) -> Resolution:
    from .quadrature import depth_for
    return Resolution() if N is None else Resolution(depth=depth_for(N))


@lru_cache(maxsize=16)
def _rule_for(res: Resolution) -> DiscRule:
    grid = ParamGrid.from_resolution(res)
    return DiscRule.from_resolution(res, extra_breaks=grid.radii)


def _grid_dict(res: Resolution, f: PowerSeries | None = None) -> dict:
    d = res.as_dict()
    if f is not None:
        d["degree"] = f.degree
    return d


def _corr(x: np.ndarray, y: np.ndarray, L: int) -> np.ndarray:
    """Rows ``sum_n x[n+k] conj(y[n])`` for k = 0..L-1 (batched)."""
    X = np.fft.fft(x, n=L, axis=-1)
    Y = np.fft.fft(y, n=L, axis=-1)
    return np.fft.ifft(X * np.conj(Y), axis=-1)


class _Profile:
    """Raw integrals of one function over the sup grid, computed once."""

    def __init__(self, f: PowerSeries, res: Resolution):
        self.f = f
        self.res = res
        self.grid = ParamGrid.from_resolution(res)
        self.rule = _rule_for(res)
        d = derivative(f).coeffs
        self.d = d
        self._modes = None

    # |f'(r e^{it})|^2 modes at every radial node
    @property
    def modes(self) -> np.ndarray:
        if self._modes is None:
            self._modes = abs2_modes(self.d, self.rule.nodes)
        return self._modes

    def box_raw(self):
        """List of ``(h, centers, int_{S(I)} |f'|^2 (1-|z|^2) dA)`` per arc length."""
        rule, grid, d = self.rule, self.grid, self.d
        out = {}
        if not np.any(d):
            return [(h, grid.centers(h), np.zeros(grid.centers(h).size)) for h in grid.lengths]
        part = [h for h in grid.lengths if h < 1.0]
        if len(part) < len(grid.lengths):
            # the whole disc only needs the zeroth angular mode
            out[1.0] = np.array([float(np.dot(np.abs(d) ** 2, _full_moments(self.res, d.size)))])
        if part:
            keep = rule.nodes >= 1.0 - max(part)
            nodes = rule.nodes[keep]
            w_modes = abs2_modes(d, nodes) * (1.0 - nodes ** 2)[:, None]
            W = np.stack([np.where(rule.outer_mask(h)[keep], rule.weights[keep], 0.0)
                          for h in part])
            for h, row in zip(part, W @ w_modes):
                out[h] = (arc_kernel(row.size, h, grid.centers(h)) @ row).real
        return [(h, grid.centers(h), out[h]) for h in grid.lengths]

    def _power_terms(self):
        rule, d = self.rule, self.d
        K = d.size - 1
        L = _fft_len(d.size)
        r = rule.nodes
        rn = power_table(r, d.size)
        # A_k(r) r^k = sum_n d_{n+k} r^{2(n+k)} conj(d_n)
        Ar = _corr(d * rn ** 2, np.broadcast_to(d, rn.shape), L)[:, : K + 1]
        return Ar, K

    def mobius_raw(self) -> np.ndarray:
        """``int_D |f'|^2 (1 - |sigma_a|^2) dA`` at each grid point ``a``."""
        pts = self.grid.points()
        if self.d.size == 1 and self.d[0] == 0:
            return np.zeros(pts.size)
        Ar, K = self._power_terms()
        r = self.rule.nodes
        V = np.power.outer(pts, np.arange(1, K + 1)).T  # (K, na)
        S = Ar[:, 1:] @ V if K else np.zeros((r.size, pts.size))
        mean = (Ar[:, :1].real + 2 * S.real)  # A_0 + 2 Re sum (ar)^k A_k
        x = np.abs(pts) ** 2
        fac = (1 - x)[None, :] * (1 - r ** 2)[:, None] / (1 - np.outer(r ** 2, x))
        return self.rule.weights @ (fac * mean)

    def log_raw(self) -> np.ndarray:
        """``int_D |f'|^2 log(1/|sigma_a|) dA`` at each grid point ``a``.

        The kernel ``log|1 - conj(a) z| - log|z - a|`` is expanded in
        angular Fourier modes on each circle ``|z| = r`` (separately for
        ``r < |a|`` and ``r > |a|``), so the angular integral is exact and
        the radial kink at ``r = |a|`` sits on a panel break.
        """
        pts = self.grid.points()
        rule, d = self.rule, self.d
        if d.size == 1 and d[0] == 0:
            return np.zeros(pts.size)
        r = rule.nodes
        K = d.size - 1
        L = _fft_len(d.size)
        rn = power_table(r, d.size)
        A = abs2_modes(d, r)[:, : K + 1]             # A_k(r)
        Ar, _ = self._power_terms()                   # A_k(r) r^k
        Ahat = _corr(np.broadcast_to(d, rn.shape), d * rn ** 2, L)[:, : K + 1]  # A_k(r) r^-k
        inv_k = 1.0 / np.arange(1, K + 1) if K else np.zeros(0)
        V = np.power.outer(pts, np.arange(1, K + 1)).T
        A0 = A[:, 0].real
        rho = np.abs(pts)
        # T1 = -Re sum (a r)^k A_k / k
        T1 = -((Ar[:, 1:] * inv_k) @ V).real
        # T2 for r > |a|
        T2_out = A0[:, None] * np.log(r)[:, None] - ((Ahat[:, 1:] * inv_k) @ V).real
        # T2 for r < |a|, grouped by |a| to keep (r/|a|)^k bounded
        T2_in = np.zeros_like(T2_out)
        for radius in np.unique(rho):
            if radius == 0.0:
                continue
            cols = np.nonzero(rho == radius)[0]
            rows = np.nonzero(r < radius)[0]
            if rows.size == 0:
                continue
            scale = np.power.outer(r[rows] / radius, np.arange(1, K + 1))
            E = np.exp(1j * np.outer(np.arange(1, K + 1), np.angle(pts[cols])))
            G = A[rows, 1:] * scale * inv_k
            block = A0[rows, None] * math.log(radius) - (G @ E).real
            T2_in[np.ix_(rows, cols)] = block
        inside = r[:, None] < rho[None, :]
        L_mean = T1 - np.where(inside, T2_in, T2_out)
        return rule.weights @ L_mean

    def boundary_raw(self):
        """``(1/2pi) int_I |f - f_I|^2`` for every grid arc, per arc length."""
        c = self.f.coeffs
        A = abs2_modes(c, np.array([1.0]))[0]
        L = A.size
        out = []
        for h in self.grid.lengths:
            centers = self.grid.centers(h)
            quad = (arc_kernel(L, h, centers) @ A).real
            # (1/2pi) int_I f = sum_n c_n kappa_n e^{i n theta0}
            Kf = arc_kernel(L, h, centers)[:, : c.size]
            mean_f = (Kf @ c) / h
            out.append((h, centers, np.maximum(quad - h * np.abs(mean_f) ** 2, 0.0)))
        return out


@lru_cache(maxsize=64)
def _full_moments(res: Resolution, n: int) -> np.ndarray:
    """``sum_i w_i (1 - r_i^2) r_i^{2k}`` for ``k < n``."""
    rule = _rule_for(res)
    r = rule.nodes
    return (rule.weights * (1.0 - r ** 2)) @ power_table(r * r, n)


def _trim(f: PowerSeries) -> PowerSeries:
    nz = np.flatnonzero(f.coeffs)
    last = int(nz[-1]) if nz.size else 0
    return f if last == f.degree else PowerSeries(f.coeffs[: last + 1])


def _raw(f: PowerSeries, res: Resolution, which: str):
    return _raw_trimmed(_trim(f), res, which)


@lru_cache(maxsize=1024)
def _raw_trimmed(f: PowerSeries, res: Resolution, which: str):
    # only the small per-grid results are cached, never the mode arrays
    return getattr(_Profile(f, res), which + "_raw")()


def _arc_sup(raw, lam: float):
    best, arg = -1.0, None
    for h, centers, vals in raw:
        scaled = vals / h ** lam
        i = int(np.argmax(scaled))
        if scaled[i] > best:
            best, arg = float(scaled[i]), (float(centers[i]), float(h))
    from .quadrature import Arc
    return best, Arc(*arg)


def _point_sup(raw, pts, lam: float):
    weights = (1 - np.abs(pts) ** 2) ** (1 - lam)
    return first_argmax(weights * raw, pts)


def morrey_seminorm_sq(f: PowerSeries, lam: float, form: str = "box",
                       res: Resolution | None = None):
    """Squared Morrey seminorm (supremum part) and its argmax.

    ``lam`` may be 0 (the ``H^2`` end point) or 1 (``BMOA`` in Garsia form).
    """
    f = as_series(f)
    res = res or default_resolution()
    if not 0.0 <= lam <= 1.0:
        raise SpaceError(f"λ out of range [0, 1]: {lam}")
    if form not in MORREY_FORMS:
        raise SpaceError(f"unknown Morrey form {form!r}; expected one of {MORREY_FORMS}")
    if form in ("box", "boundary"):
        return _arc_sup(_raw(f, res, form), lam)
    pts = ParamGrid.from_resolution(res).points()
    return _point_sup(_raw(f, res, form), pts, lam)


# ---------------------------------------------------------------------------
# Public norms

def hardy_norm(f: PowerSeries, p: float, res: Resolution | None = None,
               refine: bool = True) -> NormReport:
    """``||f||_{H^p}`` for ``p`` in ``[2, inf]``."""
    f = as_series(f)
    if not p >= 2.0:
        raise SpaceError(f"Hardy exponent must be >= 2, got {p}")
    res = res or default_resolution()
    value, arg, diag = _hardy(f, p, res)
    delta = None
    if refine:
        delta = _delta(value, _hardy(f, p, res.refine())[0])
    return NormReport(value, "circle-sup", arg, _grid_dict(res, f), delta, None, diag)


def _hardy(f: PowerSeries, p: float, res: Resolution):
    if math.isinf(p):
        v, theta = sup_norm(f, res.m, with_arg=True)
        return v, complex(math.cos(theta), math.sin(theta)), {}
    grid = ParamGrid.from_resolution(res)
    radii = np.array(sorted(set(grid.radii) | {1.0}))
    m = _pow2(max(res.m, 8 * (f.degree + 1)))
    vals = np.abs(evaluate_circle(f, radii, m)) ** p
    means = np.array([math.fsum(row) / m for row in vals])
    value, arg = first_argmax(means, list(radii))
    value = value ** (1.0 / p)
    diag = {}
    if p == 2.0:
        diag["parseval"] = math.sqrt(math.fsum(np.abs(f.coeffs) ** 2))
    return value, arg, diag


def _pow2(n: int) -> int:
    return 1 << int(math.ceil(math.log2(max(n, 1))))


def sup_norm(f: PowerSeries, m: int = 1024, with_arg: bool = False):
    """``||f||_inf = max_{|z|=1} |f(z)|`` (maximum principle).

    Dense FFT sampling locates the candidate peaks, which are then polished
    with a bounded scalar search on ``|f(e^{i theta})|^2``.
    """
    f = as_series(f)
    K = _pow2(max(m, 16 * (f.degree + 1)))
    vals = np.abs(evaluate_circle(f, 1.0, K))
    best = float(vals.max())
    arg = 2 * np.pi * int(np.argmax(vals)) / K
    if f.degree > 0 and best > 0:
        peaks = np.nonzero((vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1)))[0]
        peaks = peaks[np.argsort(-vals[peaks], kind="stable")][:8]
        step = 2 * np.pi / K

        rev = f.coeffs[::-1]

        def neg(t):
            return -abs(np.polyval(rev, complex(math.cos(t), math.sin(t))))

        for k in sorted(peaks):
            t0 = 2 * np.pi * k / K
            res = minimize_scalar(neg, bounds=(t0 - step, t0 + step), method="bounded",
                                  options={"xatol": 1e-13})
            if -res.fun > best:
                best, arg = float(-res.fun), float(res.x)
    if with_arg:
        return best, arg
    return best


def mobius_deviation(f: PowerSeries, points: np.ndarray, m: int = 1024) -> np.ndarray:
    """``||f o sigma_a - f(a)||_{H^2}`` for each ``a`` in ``points``.

    Computed as the Poisson-weighted boundary mean of ``|f - f(a)|^2``
    (the change of variables ``zeta = sigma_a(e^{i theta})``); the trapezoid
    size is chosen so that the Poisson modes beyond it are below 1e-17.
    """
    f = as_series(f)
    points = np.atleast_1d(np.asarray(points, dtype=np.complex128))
    amax = float(np.max(np.abs(points))) if points.size else 0.0
    extra = 0 if amax == 0 else int(math.ceil(math.log(1e-17) / math.log(amax)))
    M = _pow2(max(m, f.degree + extra + 1))
    zeta = np.exp(2j * np.pi * np.arange(M) / M)
    fz = evaluate_circle(f, 1.0, M)
    fa = evaluate(f, points)
    out = np.empty(points.size)
    for lo in range(0, points.size, 256):
        a = points[lo: lo + 256, None]
        P = (1 - np.abs(a) ** 2) / np.abs(1 - np.conj(a) * zeta[None, :]) ** 2
        out[lo: lo + 256] = np.mean(np.abs(fz[None, :] - fa[lo: lo + 256, None]) ** 2 * P, axis=1)
    return np.sqrt(np.maximum(out, 0.0))


def composition_norm(f: PowerSeries, a: complex, p: float, m: int = 1024,
                     method: str = "poisson") -> float:
    """``||f o sigma_a||_{H^p}`` from boundary values.

    ``poisson`` uses ``(1/2pi) int |f|^p P_a`` (the change of variables
    ``zeta = sigma_a(e^{i theta})``), ``direct`` samples
    ``f(sigma_a(e^{i theta}))`` on an ``m``-point trapezoid grid.
    """
    f = as_series(f)
    if not p >= 1.0 or math.isinf(p):
        raise SpaceError(f"composition norm needs finite p >= 1, got {p}")
    a = complex(a)
    if not abs(a) < 1:
        raise SpaceError(f"|a| must be < 1, got {abs(a)}")
    if method == "direct":
        th = np.exp(2j * np.pi * np.arange(m) / m)
        w = (a - th) / (1 - np.conj(a) * th)
        vals = np.abs(evaluate_fast_grid(f, w)) ** p
        return (math.fsum(vals) / m) ** (1.0 / p)
    if method != "poisson":
        raise SpaceError(f"unknown method {method!r}")
    extra = 0 if a == 0 else int(math.ceil(math.log(1e-17) / math.log(abs(a))))
    M = _pow2(max(m, 4 * (f.degree + 1) + extra))
    zeta = np.exp(2j * np.pi * np.arange(M) / M)
    P = (1 - abs(a) ** 2) / np.abs(1 - np.conj(a) * zeta) ** 2
    vals = np.abs(evaluate_circle(f, 1.0, M)) ** p * P
    return (math.fsum(vals) / M) ** (1.0 / p)


@lru_cache(maxsize=1024)
def _bmoa_raw(f: PowerSeries, res: Resolution) -> np.ndarray:
    pts = ParamGrid.from_resolution(res).points()
    return mobius_deviation(f, pts, res.m)


def bmoa_seminorm(f: PowerSeries, form: str = "mobius", res: Resolution | None = None):
    """Supremum part of the BMOA norm (no ``|f(0)|``) and its argmax."""
    f = as_series(f)
    res = res or default_resolution()
    if form == "mobius":
        pts = ParamGrid.from_resolution(res).points()
        return first_argmax(_bmoa_raw(f, res), pts)
    if form == "garsia":
        v, arg = _arc_sup(_raw(f, res, "box"), 1.0)
        return math.sqrt(max(v, 0.0)), arg
    raise SpaceError(f"unknown BMOA form {form!r}; expected one of {BMOA_FORMS}")


def bmoa_norm(f: PowerSeries, form: str = "mobius", res: Resolution | None = None,
              refine: bool = True) -> NormReport:
    """``|f(0)| + sup_a ||f o sigma_a - f(a)||_{H^2}`` (``mobius``) or
    ``|f(0)| + (sup_I mu_f(S(I))/|I|)^{1/2}`` (``garsia``)."""
    f = as_series(f)
    res = res or default_resolution()
    f0 = abs(f.coeffs[0])
    semi, arg = bmoa_seminorm(f, form, res)
    delta = None
    if refine:
        delta = _delta(f0 + semi, f0 + bmoa_seminorm(f, form, res.refine())[0])
    diag = {"seminorm_sq": semi ** 2} if form == "garsia" else {}
    return NormReport(f0 + semi, form, arg, _grid_dict(res, f), delta, semi, diag)


def morrey_norm(f: PowerSeries, lam: float, form: str = "box", res: Resolution | None = None,
                refine: bool = True) -> NormReport:
    """``|f(0)| + sqrt(sup ...)`` in the requested form; ``lam`` in (0, 1)."""
    f = as_series(f)
    if lam == 1.0:
        raise SpaceError("lambda = 1 is BMOA; use bmoa_norm")
    if not 0.0 < lam < 1.0:
        raise SpaceError(f"λ out of range (0, 1): {lam}")
    res = res or default_resolution()
    return _morrey_report(f, lam, form, res, refine)


def _morrey_report(f, lam, form, res, refine):
    f0 = abs(f.coeffs[0])
    sq, arg = morrey_seminorm_sq(f, lam, form, res)
    value = f0 + math.sqrt(max(sq, 0.0))
    delta = None
    if refine:
        sq1, _ = morrey_seminorm_sq(f, lam, form, res.refine())
        delta = _delta(value, f0 + math.sqrt(max(sq1, 0.0)))
    return NormReport(value, form, arg, _grid_dict(res, f), delta, math.sqrt(max(sq, 0.0)),
                      {"seminorm_sq": sq, "lambda": lam})


def space_norm(f: PowerSeries, space: SpaceSpec, res: Resolution | None = None,
               form: str | None = None) -> float:
    """Canonical norm value of ``f`` in ``space`` (no refinement)."""
    f = as_series(f)
    res = res or default_resolution()
    if space.kind == "hardy":
        return _hardy(f, space.param, res)[0]
    if space.kind == "bmoa":
        return bmoa_norm(f, form or "garsia", res, refine=False).value
    return _morrey_value(f, space.param, res, form or "box")


def _morrey_value(f, lam, res, form="box"):
    """Norm in ``L^{2,lam}`` for lam in [0, 1] (0: H^2 end point, 1: Garsia BMOA)."""
    sq, _ = morrey_seminorm_sq(f, lam, form, res)
    return abs(f.coeffs[0]) + math.sqrt(max(sq, 0.0))


def carleson_constant(mu: DensityMeasure, p: float = 1.0, res: Resolution | None = None,
                      refine: bool = True) -> NormReport:
    """``sup_I mu(S(I)) / |I|^p`` over the arc grid."""
    if not p > 0:
        raise SpaceError(f"Carleson exponent must be positive, got {p}")
    res = res or default_resolution()
    value, arg = _carleson(mu, p, res)
    delta = _delta(value, _carleson(mu, p, res.refine())[0]) if refine else None
    return NormReport(value, "box", arg, _grid_dict(res), delta, None, {"p": p})


def _carleson(mu, p, res):
    rule = _rule_for(res)
    grid = ParamGrid.from_resolution(res)
    modes = mu.modes(rule)
    vals = box_integrals_all(rule, modes, grid.lengths, grid.centers)
    raw = [(h, grid.centers(h), v.real) for h, v in zip(grid.lengths, vals)]
    return _arc_sup(raw, p)


def embedding_integral(f: PowerSeries, mu: DensityMeasure, res: Resolution | None = None) -> float:
    """``int_D |f|^2 d mu``."""
    res = res or default_resolution()
    return float(np.real(integrate_disc(_rule_for(res), mu.weighted_by(f))))


def vmoa_distance_profile(g: PowerSeries, levels: int | None = None,
                          res: Resolution | None = None):
    """Pre-limit profile of ``limsup_{|a|->1} ||g o sigma_a - g(a)||_{H^2}``.

    For ``delta_j = 2^{-j}`` returns ``(delta_j, D_j)`` with ``D_j`` the
    maximum deviation over grid points in the shell
    ``1 - delta_j <= |a| <= 1 - delta_j/2``.  Empty shells are omitted with a
    warning.
    """
    import warnings

    g = as_series(g)
    res = res or default_resolution()
    levels = res.depth if levels is None else levels
    pts = ParamGrid.from_resolution(res).points()
    dev = _bmoa_raw(g, res)
    rho = np.abs(pts)
    out = []
    for j in range(levels + 1):
        dlt = 2.0 ** -j
        mask = (rho >= 1 - dlt - 1e-12) & (rho <= 1 - dlt / 2 + 1e-12)
        if not np.any(mask):
            warnings.warn(f"no grid points in shell level {j}; level omitted", RuntimeWarning,
                          stacklevel=2)
            continue
        out.append((dlt, float(dev[mask].max())))
    return out


def growth_ratio(f: PowerSeries, lam: float, res: Resolution | None = None) -> float:
    """``sup_z |f(z)| (1-|z|^2)^{(1-lam)/2} / ||f||_{L^{2,lam}}`` (box form)."""
    f = as_series(f)
    res = res or default_resolution()
    if not 0.0 < lam < 1.0:
        raise SpaceError(f"λ out of range (0, 1): {lam}")
    norm = _morrey_value(f, lam, res)
    if norm == 0.0:
        raise SpaceError("growth ratio undefined for the zero function")
    pts = ParamGrid.from_resolution(res).points()
    vals = np.abs(evaluate(f, pts)) * (1 - np.abs(pts) ** 2) ** ((1 - lam) / 2)
    return float(vals.max()) / norm


def littlewood_paley_h2(f: PowerSeries, res: Resolution | None = None):
    """``(||f||^2_{H^2}, |f(0)|^2 + 2 int_D |f'|^2 log(1/|z|) dA)``."""
    f = as_series(f)
    res = res or default_resolution()
    lhs = math.fsum(np.abs(f.coeffs) ** 2)
    mu = DensityMeasure.from_analytic(derivative(f), lambda r: np.log(1.0 / r))
    rhs = abs(f.coeffs[0]) ** 2 + 2.0 * float(np.real(integrate_disc(_rule_for(res), mu)))
    return lhs, rhs
