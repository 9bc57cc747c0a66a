"""Quadrature on the disc, on Carleson boxes and on circles.

Area integrals use normalised area measure ``dA = r dr dtheta / pi`` and are
split as ``int_0^1 (mean over theta) 2r dr``.  The radial factor uses
Gauss-Legendre panels that halve in width towards the boundary (the weights
``1 - |z|^2`` and the near-singular test functions live there) and towards
the origin (``log 1/|z|`` weights).  The angular factor is handled through
Fourier modes: for a density known only pointwise the modes come from an FFT
of equispaced samples, for ``|p(z)|^2`` with ``p`` a polynomial they are the
exact autocorrelation of the coefficients.  Arc integrals of a trigonometric
polynomial are then exact, whatever the arc length.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.fft import next_fast_len

MAX_ANGLES = 4096


class QuadratureError(ValueError):
    pass


@dataclass(frozen=True)
class Resolution:
    """Quadrature and sup-grid parameters.

    ``q`` Gauss-Legendre order per radial panel, ``j_quad`` dyadic panels
    towards the boundary, ``inner`` dyadic panels towards the origin, ``m``
    angular trapezoid nodes, ``depth`` deepest sup-grid level ``J`` and
    ``sub`` the number of grid steps per dyadic level (1, or 2 once refined).
    """

    q: int = 8
    j_quad: int = 24
    m: int = 1024
    depth: int = 4
    inner: int = 12
    sub: int = 1

    def __post_init__(self):
        if self.q < 1 or self.j_quad < 2 or self.m < 8 or self.depth < 0 or self.sub < 1:
            raise QuadratureError(f"invalid resolution {self}")

    def refine(self) -> "Resolution":
        """One refinement step: every discretisation parameter made finer."""
        return replace(self, q=self.q + 4, j_quad=self.j_quad + 8, m=2 * self.m,
                       inner=self.inner + 4, sub=2 * self.sub)

    def as_dict(self) -> dict:
        return {"q": self.q, "j_quad": self.j_quad, "m": self.m, "depth": self.depth,
                "inner": self.inner, "sub": self.sub}


def depth_for(N: int, floor: int = 16) -> int:
    """Deepest level ``J`` with ``N 2^{-J} >= floor``."""
    if N < floor:
        raise QuadratureError(f"truncation N={N} below the grid floor {floor}")
    return int(math.floor(math.log2(N / floor) + 1e-12))


# ---------------------------------------------------------------------------
# Rules

@lru_cache(maxsize=None)
def _leggauss(q: int):
    x, w = np.polynomial.legendre.leggauss(q)
    return x, w


def _gauss_panels(breaks: np.ndarray, q: int):
    x, w = _leggauss(q)
    a, b = breaks[:-1, None], breaks[1:, None]
    nodes = (0.5 * (b - a) * x + 0.5 * (b + a)).ravel()
    weights = (0.5 * (b - a) * w).ravel()
    return nodes, weights


@dataclass(frozen=True, eq=False)
class DiscRule:
    """Polar product rule for ``int_D (.) dA`` with normalised area.

    ``weights`` already contain the Jacobian ``2r``, so for a radial
    function ``sum(weights * phi(nodes))`` approximates ``int_0^1 phi 2r dr``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    breaks: np.ndarray
    m: int
    q: int

    @classmethod
    def standard(cls, q: int = 8, j_quad: int = 24, m: int = 1024, inner: int = 12,
                 extra_breaks: Iterable[float] = ()) -> "DiscRule":
        return _standard_rule(q, j_quad, m, inner, tuple(sorted(set(float(b) for b in extra_breaks))))

    @classmethod
    def from_resolution(cls, res: Resolution, extra_breaks: Iterable[float] = ()) -> "DiscRule":
        return cls.standard(res.q, res.j_quad, res.m, res.inner, extra_breaks)

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.m) / self.m

    @property
    def size(self) -> int:
        return self.nodes.size * self.m

    def points(self) -> np.ndarray:
        """Grid of nodes, shape ``(len(nodes), m)``."""
        return self.nodes[:, None] * np.exp(1j * self.angles)[None, :]

    def outer_mask(self, h: float) -> np.ndarray:
        """Radial nodes of the box ``1 - h <= |z| < 1``."""
        edge = 1.0 - h
        if h < 1.0 and not np.any(np.isclose(self.breaks, edge, rtol=0, atol=1e-14)):
            raise QuadratureError(f"1-h={edge!r} is not a panel break; rebuild the rule with it")
        return self.nodes >= edge - 1e-14


@lru_cache(maxsize=64)
def _standard_rule(q, j_quad, m, inner, extra):
    outer = [1.0 - 2.0 ** -j for j in range(1, j_quad)]
    inner_b = [2.0 ** -k for k in range(2, inner + 2)]
    extra = [b for b in extra if 0.0 < b < 1.0]
    breaks = np.unique(np.array([0.0, 1.0] + outer + inner_b + list(extra)))
    # merge breaks closer than rounding
    keep = np.concatenate([[True], np.diff(breaks) > 1e-15])
    breaks = breaks[keep]
    breaks[-1] = 1.0
    r, w = _gauss_panels(breaks, q)
    rule = DiscRule(r, w * 2 * r, breaks, m, q)
    rule.nodes.setflags(write=False)
    rule.weights.setflags(write=False)
    return rule


@dataclass(frozen=True)
class Arc:
    """Arc of the unit circle centred at ``theta0`` with normalised length ``h``."""

    theta0: float
    h: float

    def __post_init__(self):
        if not 0.0 < self.h <= 1.0:
            raise QuadratureError(f"arc length must lie in (0, 1], got {self.h}")

    @property
    def box_center(self) -> complex:
        """The point ``(1 - |I|) zeta`` with ``zeta`` the centre of the arc."""
        return (1.0 - self.h) * complex(math.cos(self.theta0), math.sin(self.theta0))


@dataclass(frozen=True, eq=False)
class BoxRule:
    """Carleson box ``S(I)`` quadrature built on a :class:`DiscRule`.

    Radially the box keeps the panels of ``rule`` above ``1 - h``; angularly
    it integrates the Fourier modes of the density exactly over the arc.
    """

    rule: DiscRule

    @classmethod
    def for_lengths(cls, lengths: Iterable[float], q=8, j_quad=24, m=1024, inner=12) -> "BoxRule":
        return cls(DiscRule.standard(q, j_quad, m, inner, [1.0 - h for h in lengths]))


@dataclass(frozen=True, eq=False)
class ParamGrid:
    """Discretisation of ``sup_{a in D}`` and ``sup_{I subset dD}``.

    Radii ``1 - 2^{-j}`` and arc lengths ``2^{-j}`` for ``j = 0, 1/sub, ..,
    depth``; ``max(16, ceil(2 pi/(1-rho)))`` angles per radius (times
    ``sub``, capped); arc centres spaced ``h / (2 sub)``.
    """

    levels: tuple
    radii: tuple
    angle_counts: tuple
    lengths: tuple
    sub: int

    @classmethod
    def standard(cls, depth: int, sub: int = 1) -> "ParamGrid":
        return _standard_grid(depth, sub)

    @classmethod
    def from_resolution(cls, res: Resolution) -> "ParamGrid":
        return _standard_grid(res.depth, res.sub)

    def points(self) -> np.ndarray:
        return _grid_points(self)

    def point_radii(self) -> np.ndarray:
        return np.abs(self.points())

    def centers(self, h: float) -> np.ndarray:
        if h >= 1.0:
            return np.zeros(1)
        count = int(math.ceil(2 * self.sub / h - 1e-9))
        return 2 * np.pi * np.arange(count) / count

    def arcs(self) -> list[Arc]:
        return [Arc(float(t), h) for h in self.lengths for t in self.centers(h)]

    def __len__(self):
        return self.points().size


@lru_cache(maxsize=None)
def _standard_grid(depth, sub):
    levels = tuple(k / sub for k in range(depth * sub + 1))
    radii = tuple(1.0 - 2.0 ** -j for j in levels)
    counts = []
    for rho in radii:
        if rho == 0.0:
            counts.append(1)
        else:
            counts.append(min(MAX_ANGLES, max(16, math.ceil(2 * math.pi / (1 - rho))) * sub))
    lengths = tuple(2.0 ** -j for j in levels)
    return ParamGrid(levels, radii, tuple(counts), lengths, sub)


_POINTS_CACHE: dict = {}


def _grid_points(grid: ParamGrid) -> np.ndarray:
    key = (grid.radii, grid.angle_counts)
    pts = _POINTS_CACHE.get(key)
    if pts is None:
        chunks = [rho * np.exp(2j * np.pi * np.arange(n) / n) for rho, n in zip(grid.radii, grid.angle_counts)]
        pts = np.concatenate(chunks)
        pts.setflags(write=False)
        _POINTS_CACHE[key] = pts
    return pts


# ---------------------------------------------------------------------------
# Fourier modes of densities

def abs2_modes(coeffs: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """Fourier coefficients of ``theta -> |p(r e^{i theta})|^2`` per radius.

    Returned in FFT order with length ``L >= 2 deg + 1`` so nothing aliases:
    column ``k`` holds mode ``k`` for ``k < L/2`` and mode ``k - L`` above.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    radii = np.asarray(radii, dtype=float)
    L = _fft_len(coeffs.size)
    scaled = np.zeros((radii.size, L), dtype=np.complex128)
    scaled[:, : coeffs.size] = coeffs * power_table(radii, coeffs.size)
    P = np.fft.fft(scaled, axis=1)
    # sum_n p_{n+m} conj(p_n) sits at index m; the identity
    # ifft(|P|^2) = circular autocorrelation gives it directly.
    return np.fft.ifft(P * np.conj(P), axis=1)


def _fft_len(n: int) -> int:
    # lags -(n-1)..(n-1) fit without wrap-around
    return max(8, next_fast_len(2 * n - 1))


_POWERS: dict = {}


def power_table(radii: np.ndarray, n: int) -> np.ndarray:
    """``radii[i] ** k`` for ``k < n`` (cached; read-only)."""
    radii = np.asarray(radii, dtype=float)
    key = (radii.tobytes(), n)
    tab = _POWERS.get(key)
    if tab is None:
        if len(_POWERS) > 64:
            _POWERS.clear()
        tab = np.power.outer(radii, np.arange(n))
        tab.setflags(write=False)
        _POWERS[key] = tab
    return tab


def sampled_modes(values: np.ndarray) -> np.ndarray:
    """Fourier coefficients of equispaced samples (last axis is angle)."""
    return np.fft.fft(values, axis=-1) / values.shape[-1]


def modes_of(density, rule: DiscRule) -> np.ndarray:
    """Angular modes of ``density`` at the radial nodes of ``rule``."""
    if hasattr(density, "modes"):
        return density.modes(rule)
    values = _sample(density, rule)
    return sampled_modes(values)


def _sample(density, rule: DiscRule) -> np.ndarray:
    pts = rule.points()
    if callable(density):
        values = np.asarray(density(pts))
        values = np.broadcast_to(values, pts.shape)
    else:
        values = np.broadcast_to(np.asarray(density), pts.shape)
    bad = ~np.isfinite(values)
    if np.any(bad):
        i, k = np.argwhere(bad)[0]
        raise QuadratureError(
            f"density not finite at node r={rule.nodes[i]!r}, theta={rule.angles[k]!r}")
    return values


def _real_if_close(x):
    x = complex(x)
    return x.real if abs(x.imag) <= 1e-14 * max(1.0, abs(x.real)) else x


# ---------------------------------------------------------------------------
# Integrals

def integrate_disc(rule: DiscRule, density) -> float | complex:
    """``int_D density dA`` with normalised area measure."""
    modes = modes_of(density, rule)
    return _real_if_close(np.dot(rule.weights, modes[:, 0]))


def arc_kernel(L: int, h: float, centers: np.ndarray) -> np.ndarray:
    """Matrix ``K[c, k]`` with ``sum_k K[c,k] modes[k]`` the normalised arc
    integral ``(1/2pi) int_{|theta - centers[c]| < pi h} (.) dtheta``."""
    centers = np.ascontiguousarray(centers, dtype=float)
    return _arc_kernel(L, float(h), centers.tobytes())


@lru_cache(maxsize=256)
def _arc_kernel(L: int, h: float, centers_key: bytes) -> np.ndarray:
    centers = np.frombuffer(centers_key, dtype=float)
    m = np.fft.fftfreq(L, 1.0 / L)
    with np.errstate(invalid="ignore", divide="ignore"):
        kern = np.where(m == 0, h, np.sin(m * np.pi * h) / (m * np.pi))
    if h >= 1.0:
        kern = (m == 0).astype(float)
    out = kern[None, :] * np.exp(1j * np.outer(centers, m))
    out.setflags(write=False)
    return out


def box_integrals(rule: DiscRule, modes: np.ndarray, h: float, centers: np.ndarray) -> np.ndarray:
    """``int_{S(I)} density dA`` for every arc of length ``h`` at ``centers``."""
    mask = rule.outer_mask(h)
    radial = rule.weights[mask] @ modes[mask]
    vals = arc_kernel(modes.shape[1], h, np.atleast_1d(centers)) @ radial
    return vals


def box_integrals_all(rule: DiscRule, modes: np.ndarray, lengths, centers_of) -> list:
    """:func:`box_integrals` for several arc lengths sharing one radial pass.

    ``centers_of(h)`` gives the arc centres for length ``h``.
    """
    lengths = list(lengths)
    W = np.stack([np.where(rule.outer_mask(h), rule.weights, 0.0) for h in lengths])
    radial = W @ modes
    out = []
    for row, h in zip(radial, lengths):
        out.append(arc_kernel(modes.shape[1], h, np.atleast_1d(centers_of(h))) @ row)
    return out


def integrate_box(rule: DiscRule | BoxRule, density, arc: Arc) -> float | complex:
    """``int_{S(I)} density dA`` over the Carleson box of ``arc``."""
    disc = rule.rule if isinstance(rule, BoxRule) else rule
    if arc.h < 1.0 and not np.any(np.isclose(disc.breaks, 1.0 - arc.h, rtol=0, atol=1e-14)):
        disc = DiscRule.standard(disc.q, _outer_panels(disc), disc.m, _inner_panels(disc),
                                 list(disc.breaks) + [1.0 - arc.h])
    modes = modes_of(density, disc)
    return _real_if_close(box_integrals(disc, modes, arc.h, np.array([arc.theta0]))[0])


def _outer_panels(rule: DiscRule) -> int:
    return int(round(-math.log2(1.0 - rule.breaks[-2]))) + 1


def _inner_panels(rule: DiscRule) -> int:
    return int(round(-math.log2(rule.breaks[1]))) - 1


def integrate_circle(h: Callable, r: float = 1.0, m: int = 1024) -> float | complex:
    """``(1/2pi) int_0^{2pi} h(r e^{i theta}) dtheta`` by the ``m``-point trapezoid rule.

    ``h`` receives the points ``r e^{i theta_k}`` as an array.  Exact for
    trigonometric polynomials of degree below ``m``.
    """
    if not 0.0 < r <= 1.0:
        raise QuadratureError(f"circle radius must lie in (0, 1], got {r}")
    z = r * np.exp(2j * np.pi * np.arange(m) / m)
    vals = np.broadcast_to(np.asarray(h(z)), z.shape)
    return _real_if_close(math.fsum(vals.real) / m + 1j * math.fsum(vals.imag) / m)


def sup_over_grid(grid, functional: Callable, over: str = "points"):
    """Maximum of ``functional`` over grid parameters and the first argmax.

    ``over`` selects the complex points ``a`` or the arcs ``I`` of a
    :class:`ParamGrid`; any other iterable is used as is.
    """
    if isinstance(grid, ParamGrid):
        params = list(grid.points()) if over == "points" else grid.arcs()
    else:
        params = list(grid)
    if not params:
        raise QuadratureError("empty parameter grid")
    best, arg = -math.inf, None
    for p in params:
        v = float(functional(p))
        if not math.isfinite(v):
            raise QuadratureError(f"functional not finite at {p!r}")
        if v > best:
            best, arg = v, p
    return best, arg


def first_argmax(values: np.ndarray, params: Sequence):
    """Deterministic (first occurrence) max over a vector of values."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise QuadratureError("empty parameter grid")
    if not np.all(np.isfinite(values)):
        raise QuadratureError("functional not finite on the grid")
    i = int(np.argmax(values))
    return float(values[i]), params[i]
