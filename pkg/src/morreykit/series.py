"""Truncated power series for analytic functions on the unit disc.

A :class:`PowerSeries` holds the Taylor coefficients ``c_0 .. c_N`` of a
function ``f(z) = sum c_n z**n``.  All arithmetic is exact on the
coefficients (convolution, shifts, rescaling); floating point error only
enters through evaluation, which uses a compensated Horner scheme.

The module also builds the extremal test families used to probe operator
norms on Morrey and Hardy spaces, and the dilation ``g_r(z) = g(rz)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_N = 256
PRODUCT_CAP = 512
# Absolute bound on sum_{n>N} |c_n| tolerated by the test-family builders.
TAIL_TOL = 1e-4


class SeriesError(ValueError):
    """Raised for invalid series input or builder parameters."""


@dataclass(frozen=True, eq=False)
class PowerSeries:
    """Coefficients ``c_0 .. c_N`` of a truncated Taylor expansion.

    ``truncated`` is set when an operation dropped non-zero coefficients
    (a product that hit the degree cap).
    """

    coeffs: np.ndarray
    truncated: bool = False
    tail_bound: float = 0.0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=np.complex128)
        if not np.all(np.isfinite(c)):
            raise SeriesError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # -- basic protocol -------------------------------------------------
    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __len__(self):
        return self.coeffs.size

    def __getitem__(self, n):
        return self.coeffs[n]

    def __eq__(self, other):
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        name = f" {self.label}" if self.label else ""
        return f"PowerSeries<N={self.degree}{name}>"

    def key(self) -> bytes:
        """Stable byte key for caching."""
        return self.coeffs.tobytes()

    def __call__(self, z):
        return evaluate(self, z)

    # -- arithmetic -----------------------------------------------------
    def _binary(self, other, sign):
        if isinstance(other, PowerSeries):
            n = max(len(self), len(other))
            out = np.zeros(n, dtype=np.complex128)
            out[: len(self)] += self.coeffs
            out[: len(other)] += sign * other.coeffs
            return PowerSeries(out, self.truncated or other.truncated,
                               self.tail_bound + other.tail_bound)
        out = self.coeffs.copy()
        out[0] += sign * complex(other)
        return PowerSeries(out, self.truncated, self.tail_bound)

    def __add__(self, other):
        return self._binary(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, -1)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return PowerSeries(-self.coeffs, self.truncated, self.tail_bound)

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            return cauchy_product(self, other)
        a = complex(other)
        return PowerSeries(a * self.coeffs, self.truncated, abs(a) * self.tail_bound)

    __rmul__ = __mul__

    def derivative(self) -> "PowerSeries":
        return derivative(self)

    def antiderivative(self) -> "PowerSeries":
        return antiderivative(self)

    def dilate(self, r: float) -> "PowerSeries":
        return dilate(self, r)

    def to_json(self) -> dict:
        return {"coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "PowerSeries":
        try:
            pairs = obj["coeffs"]
            coeffs = [complex(float(re), float(im)) for re, im in pairs]
        except (KeyError, TypeError, ValueError) as exc:
            raise SeriesError(f"malformed series JSON: {exc}") from None
        return cls(coeffs)


def as_series(f) -> PowerSeries:
    if isinstance(f, PowerSeries):
        return f
    return PowerSeries(np.atleast_1d(np.asarray(f, dtype=np.complex128)))


# ---------------------------------------------------------------------------
# Error-free transforms.  Everything is elementwise, so the same code runs on
# python floats and on numpy arrays.

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, al * bl - (((p - ah * bh) - al * bh) - ah * bl)


def _complex_two_prod(xr, xi, yr, yi):
    p1, e1 = _two_prod(xr, yr)
    p2, e2 = _two_prod(xi, yi)
    p3, e3 = _two_prod(xr, yi)
    p4, e4 = _two_prod(xi, yr)
    re, e5 = _two_sum(p1, -p2)
    im, e6 = _two_sum(p3, p4)
    return re, im, (e1 - e2) + e5, (e3 + e4) + e6


def evaluate(f: PowerSeries, z):
    """Evaluate ``f`` at ``z`` (scalar or array) by compensated Horner.

    The running Horner value is kept together with an error term carried
    through the same recurrence, which gives roughly twice the working
    precision.  ``|z| <= 1`` is expected; points outside are accepted only
    within rounding.
    """
    f = as_series(f)
    zarr = np.asarray(z, dtype=np.complex128)
    if not np.all(np.isfinite(zarr)):
        raise SeriesError("evaluation point must be finite")
    if np.any(np.abs(zarr) > 1.0 + 1e-12):
        raise SeriesError("evaluation point outside the closed unit disc")
    xr, xi = zarr.real, zarr.imag
    c = f.coeffs
    sr = np.full_like(xr, c[-1].real)
    si = np.full_like(xr, c[-1].imag)
    er = np.zeros_like(xr)
    ei = np.zeros_like(xr)
    for cn in c[-2::-1]:
        pr, pi, pe_r, pe_i = _complex_two_prod(sr, si, xr, xi)
        sr, se_r = _two_sum(pr, cn.real)
        si, se_i = _two_sum(pi, cn.imag)
        er, ei = (er * xr - ei * xi) + (pe_r + se_r), (er * xi + ei * xr) + (pe_i + se_i)
    out = (sr + er) + 1j * (si + ei)
    if np.ndim(z) == 0:
        return complex(out)
    return out


def evaluate_fast(f: PowerSeries, z):
    """Plain vectorised Horner; used on large point clouds."""
    c = as_series(f).coeffs
    z = np.asarray(z, dtype=np.complex128)
    acc = np.full(z.shape, c[-1], dtype=np.complex128)
    for cn in c[-2::-1]:
        acc = acc * z + cn
    return acc


def evaluate_circle(f: PowerSeries, r: float | np.ndarray, m: int) -> np.ndarray:
    """Values of ``f`` at ``r e^{2 pi i k/m}``, k = 0..m-1, via FFT.

    ``r`` may be an array of radii; the result then has shape ``(len(r), m)``.
    Requires ``m > degree`` so the DFT does not alias.
    """
    c = as_series(f).coeffs
    if m <= c.size - 1:
        raise SeriesError(f"need more than {c.size - 1} angular nodes, got {m}")
    r = np.asarray(r, dtype=float)
    n = np.arange(c.size)
    scaled = c * np.power.outer(r, n) if r.ndim else c * r ** n
    pad = np.zeros(scaled.shape[:-1] + (m,), dtype=np.complex128)
    pad[..., : c.size] = scaled
    return np.fft.ifft(pad, axis=-1) * m


# ---------------------------------------------------------------------------
# Coefficient calculus

def derivative(f: PowerSeries) -> PowerSeries:
    c = as_series(f).coeffs
    if c.size == 1:
        return PowerSeries([0.0], f.truncated)
    return PowerSeries(c[1:] * np.arange(1, c.size), f.truncated)


def antiderivative(f: PowerSeries) -> PowerSeries:
    c = as_series(f).coeffs
    out = np.zeros(c.size + 1, dtype=np.complex128)
    out[1:] = c / np.arange(1, c.size + 1)
    return PowerSeries(out, f.truncated)


def cauchy_product(f: PowerSeries, g: PowerSeries, cap: int = PRODUCT_CAP) -> PowerSeries:
    """Coefficients ``sum_k f_k g_{n-k}`` up to degree ``min(N_f + N_g, cap)``.

    Dropped non-zero coefficients set the ``truncated`` flag and emit a
    warning; they are never discarded silently.
    """
    f, g = as_series(f), as_series(g)
    full = np.convolve(f.coeffs, g.coeffs)
    dropped = full[cap + 1:]
    truncated = f.truncated or g.truncated
    if dropped.size and np.any(dropped != 0):
        warnings.warn(f"product truncated at degree {cap}", RuntimeWarning, stacklevel=2)
        truncated = True
    return PowerSeries(full[: cap + 1], truncated)


def dilate(g: PowerSeries, r: float) -> PowerSeries:
    if not 0.0 <= r <= 1.0:
        raise SeriesError(f"dilation radius must lie in [0, 1], got {r}")
    c = as_series(g).coeffs
    return PowerSeries(c * r ** np.arange(c.size), g.truncated)


def monomial(n: int, N: int | None = None) -> PowerSeries:
    if n < 0:
        raise SeriesError("monomial degree must be >= 0")
    N = n if N is None else N
    if n > N:
        raise SeriesError(f"monomial z^{n} exceeds truncation N={N}")
    c = np.zeros(N + 1, dtype=np.complex128)
    c[n] = 1.0
    return PowerSeries(c, label=f"monomial:{n}")


def constant(value: complex) -> PowerSeries:
    return PowerSeries([complex(value)], label=f"constant:{value}")


def binomial_tail_bound(s: float, b: complex, N: int, scale: float = 1.0) -> float:
    """Upper bound on ``sum_{n>N} |c_n|`` for ``scale * (1 - conj(b) z)^{-s}``.

    The coefficient ratio ``|b| (s+n)/(n+1)`` is monotone in ``n``, so its
    supremum over the tail sits at one of the ends.
    """
    x = abs(b)
    if x == 0.0:
        return 0.0
    q = max(x, x * (s + N + 1) / (N + 2))
    if q >= 1.0:
        return math.inf
    # log|c_{N+1}| = log Gamma(s+N+1) - log Gamma(s) - log (N+1)! + (N+1) log|b|
    log_c = (math.lgamma(s + N + 1) - math.lgamma(s) - math.lgamma(N + 2)
             + (N + 1) * math.log(x))
    return abs(scale) * math.exp(log_c) / (1.0 - q)


def binomial_series(s: float, b: complex, N: int = DEFAULT_N) -> PowerSeries:
    """Taylor series of ``(1 - conj(b) z)^{-s}`` on the principal branch.

    Built from the recurrence ``c_n = c_{n-1} (s+n-1)/n conj(b)``, so the
    result is single valued whatever the phase of ``b``.
    """
    if s <= 0:
        raise SeriesError(f"binomial exponent must be positive, got {s}")
    b = complex(b)
    if abs(b) >= 1.0:
        raise SeriesError("binomial parameter must satisfy |b| < 1")
    n = np.arange(1, N + 1)
    ratios = (s + n - 1) / n * np.conj(b)
    c = np.empty(N + 1, dtype=np.complex128)
    c[0] = 1.0
    c[1:] = np.cumprod(ratios)
    return PowerSeries(c, tail_bound=binomial_tail_bound(s, b, N),
                       label=f"binomial:{s}:{b}")


def geometric(b: complex, N: int = DEFAULT_N) -> PowerSeries:
    """``1 / (1 - conj(b) z)``."""
    out = binomial_series(1.0, b, N)
    return PowerSeries(out.coeffs, tail_bound=out.tail_bound, label=f"geometric:{b}")


def lacunary(coeffs: Sequence[complex], N: int | None = None) -> PowerSeries:
    """``sum_k a_k z^{2^k}`` for the given ``a_0 .. a_K``."""
    K = len(coeffs) - 1
    deg = 2 ** K
    N = deg if N is None else N
    if deg > N:
        raise SeriesError(f"lacunary degree 2^{K} exceeds truncation N={N}")
    c = np.zeros(N + 1, dtype=np.complex128)
    for k, a in enumerate(coeffs):
        c[2 ** k] = a
    return PowerSeries(c, label=f"lacunary:{K}")


# ---------------------------------------------------------------------------
# Test families

FAMILIES = ("fb", "Fb", "hb", "kernel")


@dataclass(frozen=True)
class TestFamilyKind:
    """One member of an extremal test family.

    ``kind`` is ``fb`` / ``Fb`` (Morrey index ``lam`` in (0, 1)) or ``hb`` /
    ``kernel`` (Hardy exponent ``p`` in [2, inf]).
    """

    __test__ = False  # not a pytest class

    kind: str
    b: complex
    param: float

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise SeriesError(f"unknown family {self.kind!r}; expected one of {FAMILIES}")
        b = complex(self.b)
        object.__setattr__(self, "b", b)
        if abs(b) >= 1.0:
            raise SeriesError("family parameter b must satisfy |b| < 1")
        if self.kind in ("fb", "Fb"):
            if not 0.0 < self.param < 1.0:
                raise SeriesError(f"lambda must lie in (0, 1), got {self.param}")
        else:
            if not self.param >= 2.0:
                raise SeriesError(f"p must lie in [2, inf], got {self.param}")
        if self.kind == "kernel" and abs(b) < 0.5:
            raise SeriesError("kernel family requires |b| >= 1/2")

    @property
    def inv_p(self) -> float:
        return 0.0 if math.isinf(self.param) else 1.0 / self.param

    def pointwise(self, z):
        """Closed form of the family member, for cross-checking the series."""
        b, z = self.b, np.asarray(z, dtype=np.complex128)
        w = 1.0 - abs(b) ** 2
        u = 1.0 - np.conj(b) * z
        if self.kind == "fb":
            sigma = (b - z) / u
            return w ** ((self.param - 1) / 2) * (sigma - b)
        if self.kind == "Fb":
            return w * u ** ((self.param - 3) / 2)
        if self.kind == "hb":
            return w / u ** (1 + self.inv_p)
        return w ** (1 - self.inv_p) / (np.conj(b) * u)


def required_degree(fam: TestFamilyKind, tol: float = TAIL_TOL) -> int:
    """Smallest truncation degree whose tail bound is below ``tol``."""
    N = 16
    while _family_tail(fam, N) > tol:
        N *= 2
        if N > 2 ** 24:
            return N
    lo, hi = N // 2, N
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _family_tail(fam, mid) > tol:
            lo = mid
        else:
            hi = mid
    return hi


def _family_tail(fam: TestFamilyKind, N: int) -> float:
    b = fam.b
    w = 1.0 - abs(b) ** 2
    if fam.kind == "fb":
        # c_n = -w^{(lam+1)/2} conj(b)^{n-1}, n >= 1
        scale = w ** ((fam.param + 1) / 2)
        return scale * abs(b) ** N / (1 - abs(b)) if b else 0.0
    if fam.kind == "Fb":
        return binomial_tail_bound((3 - fam.param) / 2, b, N, w)
    if fam.kind == "hb":
        return binomial_tail_bound(1 + fam.inv_p, b, N, w)
    return binomial_tail_bound(1.0, b, N, w ** (1 - fam.inv_p) / abs(b))


def test_function(fam: TestFamilyKind, N: int = DEFAULT_N, tol: float = TAIL_TOL) -> PowerSeries:
    """Series of degree ``N`` for the family member ``fam``.

    Raises :class:`SeriesError` with the required degree when the discarded
    tail would exceed ``tol``.
    """
    tail = _family_tail(fam, N)
    if tail > tol:
        raise SeriesError(
            f"|b|={abs(fam.b):.4g} too close to 1 for N={N}: tail bound {tail:.3g} > {tol:g}; "
            f"use N >= {required_degree(fam, tol)}")
    b = fam.b
    w = 1.0 - abs(b) ** 2
    label = f"{fam.kind}:{b}:{fam.param}"
    if fam.kind == "fb":
        c = np.zeros(N + 1, dtype=np.complex128)
        c[1:] = -(w ** ((fam.param + 1) / 2)) * np.conj(b) ** np.arange(N)
    elif fam.kind == "Fb":
        c = w * binomial_series((3 - fam.param) / 2, b, N).coeffs
    elif fam.kind == "hb":
        c = w * binomial_series(1 + fam.inv_p, b, N).coeffs
    else:
        c = (w ** (1 - fam.inv_p) / np.conj(b)) * geometric(b, N).coeffs
    return PowerSeries(c, tail_bound=tail, label=label)


test_function.__test__ = False  # not a pytest test when imported into tests


# ---------------------------------------------------------------------------
# Mobius maps

@dataclass(frozen=True)
class MobiusMap:
    """The disc automorphism ``sigma_a(z) = (a - z) / (1 - conj(a) z)``."""

    a: complex

    def __post_init__(self):
        a = complex(self.a)
        if not abs(a) < 1.0:
            raise SeriesError("Mobius parameter must satisfy |a| < 1")
        object.__setattr__(self, "a", a)

    def __call__(self, z):
        return mobius_evaluate(self, z)

    def derivative_abs2(self, z):
        """``|sigma_a'(z)|^2 = (1-|a|^2)^2 / |1 - conj(a) z|^4``."""
        a = self.a
        return (1 - abs(a) ** 2) ** 2 / np.abs(1 - np.conj(a) * np.asarray(z)) ** 4


def mobius_evaluate(m: MobiusMap, z):
    a = m.a
    z = np.asarray(z, dtype=np.complex128) if np.ndim(z) else complex(z)
    return (a - z) / (1 - np.conj(a) * z)


# ---------------------------------------------------------------------------
# Named builders

def _parse_complex(tok: str) -> complex:
    try:
        return complex(tok.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise SeriesError(f"cannot parse complex number {tok!r}") from None


def _parse_float(tok: str) -> float:
    try:
        return float(tok)
    except ValueError:
        raise SeriesError(f"cannot parse number {tok!r}") from None


def _parse_p(tok: str) -> float:
    return math.inf if tok.strip().lower() in ("inf", "infinity", "oo") else _parse_float(tok)


def build(spec: str, N: int = DEFAULT_N, tol: float = TAIL_TOL) -> PowerSeries:
    """Build a series from a named builder string.

    Recognised forms::

        monomial:n  constant:c  geometric:b  lacunary:K:c0,c1,...
        lacunary:K:pow:x  fb:b:lambda  Fb:b:lambda  hb:b:p  kernel:b:p
        random:deg:seed
    """
    parts = spec.strip().split(":")
    head, args = parts[0], parts[1:]
    try:
        if head == "monomial" and len(args) == 1:
            out = monomial(int(args[0]), max(int(args[0]), 0))
        elif head == "constant" and len(args) == 1:
            out = constant(_parse_complex(args[0]))
        elif head == "geometric" and len(args) == 1:
            out = geometric(_parse_complex(args[0]), N)
        elif head == "lacunary" and len(args) >= 2:
            K = int(args[0])
            if args[1] == "pow" and len(args) == 3:
                x = _parse_complex(args[2])
                cs = [x ** k for k in range(K + 1)]
            else:
                cs = [_parse_complex(t) for t in args[1].split(",")]
                if len(cs) == 1:
                    cs = cs * (K + 1)
                if len(cs) != K + 1:
                    raise SeriesError(f"lacunary:{K} needs 1 or {K + 1} coefficients")
            out = lacunary(cs, max(N, 2 ** K))
        elif head in FAMILIES and len(args) == 2:
            b = _parse_complex(args[0])
            param = _parse_float(args[1]) if head in ("fb", "Fb") else _parse_p(args[1])
            out = test_function(TestFamilyKind(head, b, param), N, tol)
        elif head == "random" and len(args) == 2:
            out = random_polynomial(int(args[0]), int(args[1]))
        else:
            raise SeriesError(f"unknown series builder {spec!r}")
    except ValueError as exc:
        if isinstance(exc, SeriesError):
            raise
        raise SeriesError(f"bad builder {spec!r}: {exc}") from None
    return PowerSeries(out.coeffs, out.truncated, out.tail_bound, label=spec)


def random_polynomial(deg: int, seed: int = 0) -> PowerSeries:
    """Polynomial with standard complex Gaussian coefficients scaled by 1/sqrt(n+1)."""
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
    return PowerSeries(c / np.sqrt(np.arange(1, deg + 2)), label=f"random:{deg}:{seed}")


def linear_combination(terms: Iterable[tuple[complex, PowerSeries]]) -> PowerSeries:
    out = None
    for a, f in terms:
        out = a * f if out is None else out + a * f
    if out is None:
        raise SeriesError("empty combination")
    return out
