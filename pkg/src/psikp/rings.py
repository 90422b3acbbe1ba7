"""Exact differential coefficient rings.

Three pluggable rings share one informal element protocol (``+``, ``-``,
``*``, ``scale``, ``derive``, ``antiderive``, ``mean``, ``invert``):

* trigonometric polynomials ``sum c_n e^{inx}`` on the circle, with Gaussian
  rational coefficients (``FourierElem``) -- derivation is ``d/dx``, the
  integration functional is the mean (coefficient of ``e^{0ix}``);
* rational-coefficient polynomials in one variable (``PolyElem``) --
  antiderivatives always exist, but there is no invariant integration
  functional;
* truncated power series in a formal parameter ``z`` over either base ring
  (``ZSeriesElem``), all structure maps acting componentwise.

All arithmetic is exact: scalars are GMP rationals (``gmpy2.mpq``) or
Gaussian rationals built from them.  Elements are immutable values with
structural equality on canonical forms (no stored zero coefficients).
"""

from __future__ import annotations

from typing import Iterable, Union

from gmpy2 import mpq

from .errors import NonZeroMean, NotAUnit, RingMismatch, UnsupportedRing

Q = mpq  # exact rational scalar type used throughout the package

QZERO = Q(0)
QONE = Q(1)
_MPQ = type(QZERO)


def as_q(x) -> Q:
    """Coerce an int, Fraction, decimal string or mpq to mpq."""
    if type(x) is _MPQ:
        return x
    return Q(x)


class GaussRational:
    """Gaussian rational ``re + im*i`` with exact mpq components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is _MPQ else Q(re)
        self.im = im if type(im) is _MPQ else Q(im)

    def __add__(self, other):
        other = _as_gauss(other)
        return _gr(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_gauss(other)
        return _gr(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _as_gauss(other) - self

    def __neg__(self):
        return _gr(-self.re, -self.im)

    def __mul__(self, other):
        if type(other) is not GaussRational:
            other = _as_gauss(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        return _gr(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def invert(self) -> "GaussRational":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise NotAUnit("0 is not invertible")
        return _gr(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * _as_gauss(other).invert()

    def conjugate(self) -> "GaussRational":
        return GaussRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, type(QZERO))):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


def _gr(re: Q, im: Q) -> GaussRational:
    """Construction fast path: components must already be mpq."""
    g = GaussRational.__new__(GaussRational)
    g.re = re
    g.im = im
    return g


GR_ZERO = GaussRational(0, 0)
GR_ONE = GaussRational(1, 0)
GR_I = GaussRational(0, 1)


def _as_gauss(x) -> GaussRational:
    if isinstance(x, GaussRational):
        return x
    return GaussRational(as_q(x))


Scalar = Union[int, Q, GaussRational]


class Ring:
    """Tag object identifying a coefficient ring (and its base, for z-series)."""

    __slots__ = ("kind", "base")

    def __init__(self, kind: str, base: "Ring | None" = None):
        self.kind = kind
        self.base = base

    def __eq__(self, other):
        return (
            isinstance(other, Ring)
            and self.kind == other.kind
            and self.base == other.base
        )

    def __hash__(self):
        return hash((self.kind, self.base))

    def __repr__(self):
        return self.tag

    @property
    def tag(self) -> str:
        if self.base is not None:
            return f"{self.base.tag}-z"
        return self.kind

    @property
    def is_z(self) -> bool:
        return self.base is not None

    def zero(self):
        if self.is_z:
            return ZSeriesElem(self.base, {}, None)
        if self.kind == "fourier":
            return FourierElem({})
        return PolyElem({})

    def one(self):
        return self.coerce(1)

    def coerce(self, x: Scalar):
        """Embed an exact scalar as a constant element of this ring."""
        if self.is_z:
            c = self.base.coerce(x)
            return ZSeriesElem(self.base, {0: c} if not c.is_zero() else {}, None)
        if self.kind == "fourier":
            g = _as_gauss(x)
            return FourierElem({0: g} if g else {})
        if isinstance(x, GaussRational):
            if x.im:
                raise RingMismatch("polynomial ring has rational coefficients only")
            x = x.re
        q = as_q(x)
        return PolyElem({0: q} if q else {})

    @property
    def supports_mean(self) -> bool:
        if self.is_z:
            return self.base.supports_mean
        return self.kind == "fourier"


FOURIER = Ring("fourier")
POLY = Ring("poly")
FOURIER_Z = Ring("z", FOURIER)
POLY_Z = Ring("z", POLY)


def ring_from_tag(tag: str) -> Ring:
    table = {
        "fourier": FOURIER,
        "poly": POLY,
        "fourier-z": FOURIER_Z,
        "poly-z": POLY_Z,
    }
    if tag not in table:
        raise RingMismatch(f"unknown ring tag {tag!r}")
    return table[tag]


def _check_same(a, b):
    if a.ring != b.ring:
        raise RingMismatch(f"ring mismatch: {a.ring.tag} vs {b.ring.tag}")


class FourierElem:
    """Finite sum ``c_n e^{inx}`` with Gaussian rational coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs: dict):
        self.c = {n: v for n, v in coeffs.items() if v}

    @classmethod
    def _raw(cls, coeffs: dict) -> "FourierElem":
        self = object.__new__(cls)
        self.c = coeffs
        return self

    @property
    def ring(self) -> Ring:
        return FOURIER

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if isinstance(other, FourierElem):
            return self.c == other.c
        if isinstance(other, (int, type(QZERO), GaussRational)):
            return self == FOURIER.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __add__(self, other):
        _check_same(self, other)
        out = dict(self.c)
        for n, v in other.c.items():
            w = out.get(n)
            if w is None:
                out[n] = v
            else:
                w = w + v
                if w:
                    out[n] = w
                else:
                    del out[n]
        return FourierElem._raw(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return FourierElem._raw({n: -v for n, v in self.c.items()})

    def __mul__(self, other):
        if isinstance(other, (int, type(QZERO), GaussRational)):
            return self.scale(other)
        _check_same(self, other)
        acc: dict = {}
        items = list(other.c.items())
        for n, v in self.c.items():
            a, b = v.re, v.im
            for m, w in items:
                c, d = w.re, w.im
                k = n + m
                cur = acc.get(k)
                if cur is None:
                    acc[k] = [a * c - b * d, a * d + b * c]
                else:
                    cur[0] += a * c - b * d
                    cur[1] += a * d + b * c
        return FourierElem._raw(
            {k: _gr(p, q) for k, (p, q) in acc.items() if p or q}
        )

    __rmul__ = __mul__

    def scale(self, s: Scalar) -> "FourierElem":
        g = _as_gauss(s)
        if not g:
            return FourierElem._raw({})
        if not g.im:
            q = g.re
            return FourierElem._raw(
                {n: _gr(v.re * q, v.im * q) for n, v in self.c.items()}
            )
        return FourierElem._raw({n: v * g for n, v in self.c.items()})

    def derive(self) -> "FourierElem":
        # e^{inx} is an eigenfunction: c_n -> (i n) c_n
        out = {}
        for n, v in self.c.items():
            if n:
                out[n] = _gr(-n * v.im, n * v.re)
        return FourierElem._raw(out)

    def antiderive(self) -> "FourierElem":
        c0 = self.c.get(0)
        if c0:
            raise NonZeroMean(
                "no periodic antiderivative: mean is nonzero", mean=c0
            )
        out = {}
        for n, v in self.c.items():
            out[n] = _gr(v.im / n, -v.re / n)
        return FourierElem._raw(out)

    def mean(self) -> "FourierElem":
        c0 = self.c.get(0)
        return FourierElem._raw({0: c0} if c0 else {})

    def mean_scalar(self) -> GaussRational:
        return self.c.get(0, GR_ZERO)

    def invert(self) -> "FourierElem":
        # units of the trigonometric-polynomial ring are single modes
        if len(self.c) != 1:
            raise NotAUnit("only single-mode trigonometric monomials are units")
        (n, v), = self.c.items()
        return FourierElem._raw({-n: v.invert()})

    def derivation_nilpotent(self) -> bool:
        return all(n == 0 for n in self.c)

    def __repr__(self):
        if not self.c:
            return "0"
        parts = []
        for n in sorted(self.c):
            v = self.c[n]
            if n == 0:
                parts.append(f"{v!r}")
            else:
                parts.append(f"{v!r}*e^{{{n}ix}}")
        return " + ".join(parts)


class PolyElem:
    """Polynomial in one variable over the rationals."""

    __slots__ = ("c",)

    def __init__(self, coeffs: dict):
        self.c = {d: as_q(v) for d, v in coeffs.items() if v}

    @classmethod
    def _raw(cls, coeffs: dict) -> "PolyElem":
        self = object.__new__(cls)
        self.c = coeffs
        return self

    @property
    def ring(self) -> Ring:
        return POLY

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if isinstance(other, PolyElem):
            return self.c == other.c
        if isinstance(other, (int, type(QZERO))):
            return self == POLY.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __add__(self, other):
        _check_same(self, other)
        out = dict(self.c)
        for d, v in other.c.items():
            w = out.get(d)
            if w is None:
                out[d] = v
            else:
                w = w + v
                if w:
                    out[d] = w
                else:
                    del out[d]
        return PolyElem._raw(out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return PolyElem._raw({d: -v for d, v in self.c.items()})

    def __mul__(self, other):
        if isinstance(other, (int, type(QZERO))):
            return self.scale(other)
        _check_same(self, other)
        out: dict = {}
        for d, v in self.c.items():
            for e, w in other.c.items():
                k = d + e
                p = v * w
                u = out.get(k)
                out[k] = p if u is None else u + p
        return PolyElem({d: v for d, v in out.items()})

    __rmul__ = __mul__

    def scale(self, s: Scalar) -> "PolyElem":
        if isinstance(s, GaussRational):
            if s.im:
                raise RingMismatch("polynomial ring has rational coefficients only")
            s = s.re
        q = as_q(s)
        if not q:
            return PolyElem._raw({})
        return PolyElem._raw({d: v * q for d, v in self.c.items()})

    def derive(self) -> "PolyElem":
        return PolyElem._raw({d - 1: d * v for d, v in self.c.items() if d})

    def antiderive(self) -> "PolyElem":
        # integration constant fixed to 0
        return PolyElem._raw({d + 1: v / (d + 1) for d, v in self.c.items()})

    def mean(self):
        raise UnsupportedRing("polynomial ring has no invariant integration functional")

    def invert(self) -> "PolyElem":
        if set(self.c) != {0}:
            raise NotAUnit("only nonzero constants are units in the polynomial ring")
        return PolyElem._raw({0: 1 / self.c[0]})

    def derivation_nilpotent(self) -> bool:
        return True

    def __repr__(self):
        if not self.c:
            return "0"
        parts = []
        for d in sorted(self.c):
            v = self.c[d]
            parts.append(str(v) if d == 0 else f"{v}*x^{d}")
        return " + ".join(parts)


def _zmin(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class ZSeriesElem:
    """Truncated power series ``sum z^m a_m`` over a base ring.

    ``zmax`` is the truncation order; ``zmax=None`` marks an exact element
    (typically a constant) that never truncates its partners.  Arithmetic on
    mixed truncations keeps the finer of the two windows.
    """

    __slots__ = ("base", "c", "zmax")

    def __init__(self, base: Ring, coeffs: dict, zmax: int | None):
        if zmax is not None and zmax < 0:
            raise ValueError("zmax must be nonnegative")
        self.base = base
        self.zmax = zmax
        self.c = {
            m: v
            for m, v in coeffs.items()
            if not v.is_zero() and (zmax is None or m <= zmax)
        }

    @classmethod
    def _raw(cls, base, coeffs, zmax):
        self = object.__new__(cls)
        self.base = base
        self.c = coeffs
        self.zmax = zmax
        return self

    @property
    def ring(self) -> Ring:
        return FOURIER_Z if self.base.kind == "fourier" else POLY_Z

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if isinstance(other, ZSeriesElem):
            return (
                self.base == other.base
                and self.zmax == other.zmax
                and self.c == other.c
            )
        return NotImplemented

    def __hash__(self):
        return hash((self.zmax, frozenset(self.c.items())))

    def truncate(self, zmax: int | None) -> "ZSeriesElem":
        zm = _zmin(self.zmax, zmax)
        if zm == self.zmax:
            return self
        return ZSeriesElem(self.base, self.c, zm)

    def __add__(self, other):
        _check_same(self, other)
        zm = _zmin(self.zmax, other.zmax)
        out = dict(self.c)
        for m, v in other.c.items():
            w = out.get(m)
            out[m] = v if w is None else w + v
        return ZSeriesElem(self.base, out, zm)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return ZSeriesElem._raw(self.base, {m: -v for m, v in self.c.items()}, self.zmax)

    def __mul__(self, other):
        if isinstance(other, (int, type(QZERO), GaussRational)):
            return self.scale(other)
        _check_same(self, other)
        zm = _zmin(self.zmax, other.zmax)
        out: dict = {}
        for m, v in self.c.items():
            for n, w in other.c.items():
                k = m + n
                if zm is not None and k > zm:
                    continue
                p = v * w
                u = out.get(k)
                out[k] = p if u is None else u + p
        return ZSeriesElem(self.base, out, zm)

    __rmul__ = __mul__

    def scale(self, s: Scalar) -> "ZSeriesElem":
        return ZSeriesElem(
            self.base, {m: v.scale(s) for m, v in self.c.items()}, self.zmax
        )

    def derive(self) -> "ZSeriesElem":
        return ZSeriesElem(
            self.base, {m: v.derive() for m, v in self.c.items()}, self.zmax
        )

    def antiderive(self) -> "ZSeriesElem":
        out = {}
        for m, v in self.c.items():
            try:
                out[m] = v.antiderive()
            except NonZeroMean as exc:
                raise NonZeroMean(
                    f"no antiderivative: component of z^{m} has nonzero mean",
                    mean=exc.mean,
                ) from None
        return ZSeriesElem(self.base, out, self.zmax)

    def mean(self) -> "ZSeriesElem":
        if not self.base.supports_mean:
            raise UnsupportedRing(
                "base ring has no invariant integration functional"
            )
        return ZSeriesElem(
            self.base, {m: v.mean() for m, v in self.c.items()}, self.zmax
        )

    def invert(self) -> "ZSeriesElem":
        """Inverse by the standard lower-triangular recursion on z-powers."""
        a0 = self.c.get(0)
        if a0 is None:
            raise NotAUnit("constant term of the z-series is zero")
        if self.zmax is None and len(self.c) > 1:
            raise NotAUnit("exact z-series with positive-order terms has no polynomial inverse")
        b0 = a0.invert()
        out = {0: b0}
        top = self.zmax if self.zmax is not None else 0
        for p in range(1, top + 1):
            acc = None
            for k in range(p):
                a = self.c.get(p - k)
                if a is None:
                    continue
                t = a * out[k]
                acc = t if acc is None else acc + t
            if acc is not None:
                out[p] = -(b0 * acc)
        return ZSeriesElem(self.base, out, self.zmax)

    def derivation_nilpotent(self) -> bool:
        return all(v.derivation_nilpotent() for v in self.c.values())

    def __repr__(self):
        if not self.c:
            return "0"
        parts = []
        for m in sorted(self.c):
            body = repr(self.c[m])
            parts.append(body if m == 0 else f"z^{m}*({body})")
        tail = "" if self.zmax is None else f" + O(z^{self.zmax + 1})"
        return " + ".join(parts) + tail


def is_one(elem) -> bool:
    """Equality with the ring unit on the element's own truncation window."""
    return (elem - elem.ring.one()).is_zero()


def fourier(coeffs: dict) -> FourierElem:
    """Build a trigonometric polynomial from ``{mode: coefficient}``."""
    return FourierElem({n: _as_gauss(v) for n, v in coeffs.items()})


def poly(coeffs: dict) -> PolyElem:
    """Build a rational polynomial from ``{degree: coefficient}``."""
    return PolyElem(coeffs)


def zseries(base: Ring, coeffs: dict, zmax: int | None) -> ZSeriesElem:
    return ZSeriesElem(base, coeffs, zmax)


def sin_x() -> FourierElem:
    """sin(x) = (e^{ix} - e^{-ix}) / 2i."""
    h = GaussRational(0, Q(-1, 2))
    return fourier({1: h, -1: -h})


def cos_x(n: int = 1) -> FourierElem:
    h = GaussRational(Q(1, 2), 0)
    return fourier({n: h, -n: h})


RingElem = Union[FourierElem, PolyElem, ZSeriesElem]
