"""Formal Laurent series over the rationals, and the Euler-method escape.

``R((X))`` is the field of series with finitely many negative-degree terms.
Its unit group is everything nonzero, multiplication and inversion are given
by lower-triangular recursions, and yet the Euler scheme for the constant
right-logarithmic derivative ``X^{-1}`` fails to converge inside the field:
the partial products ``(1 + X^{-1}/n)^n`` converge coefficientwise (the
degree ``-m`` coefficient tends to ``1/m!``) while their supports run away
to degree ``-n``.  Both halves of that statement are finite, exact
computations, carried out here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NotAUnit
from .rings import Q, as_q

INF = float("inf")


NEG_INF = float("-inf")


class LaurentSeries:
    """Sparse rational Laurent series with tracked reliability window.

    ``low`` is the lowest reliable degree: stored support sits at or above
    it, degrees under it are unknown/dropped (``-inf`` for exact series,
    whose finitely-negative support is structural).  Inverses have infinite
    tails in the *upward* direction, so ``top`` records the highest reliable
    degree of a truncated result (``inf`` for exact series); arithmetic
    propagates both markers.
    """

    __slots__ = ("c", "low", "top")

    def __init__(self, coeffs: dict, low=NEG_INF, top=INF):
        self.c = {
            n: as_q(v) for n, v in coeffs.items() if v and low <= n <= top
        }
        self.top = top
        self.low = low

    @classmethod
    def zero(cls) -> "LaurentSeries":
        return cls({})

    @classmethod
    def one(cls) -> "LaurentSeries":
        return cls({0: 1})

    @classmethod
    def x(cls, n: int = 1) -> "LaurentSeries":
        return cls({n: 1})

    def is_zero(self) -> bool:
        return not self.c

    def coeff(self, n: int) -> Q:
        return self.c.get(n, Q(0))

    def lowest_degree(self):
        """Smallest stored degree (the valuation); -inf convention for 0."""
        return min(self.c) if self.c else NEG_INF

    def degree(self):
        return max(self.c) if self.c else NEG_INF

    def __eq__(self, other):
        """Structural equality on the common reliable window."""
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        hi = min(self.top, other.top)
        lo = max(self.low, other.low)
        keys = set(self.c) | set(other.c)
        return all(
            self.coeff(n) == other.coeff(n) for n in keys if lo <= n <= hi
        )

    __hash__ = None

    def __add__(self, other):
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
        return LaurentSeries(
            out, max(self.low, other.low), min(self.top, other.top)
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LaurentSeries(
            {n: -v for n, v in self.c.items()}, self.low, self.top
        )

    def scale(self, s) -> "LaurentSeries":
        q = as_q(s)
        if not q:
            return LaurentSeries({}, self.low, self.top)
        return LaurentSeries({n: v * q for n, v in self.c.items()}, self.low, self.top)

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            return self.scale(other)
        top = INF
        if self.top != INF:
            top = min(top, self.top + other.lowest_degree())
        if other.top != INF:
            top = min(top, other.top + self.lowest_degree())
        low = NEG_INF
        if self.low != NEG_INF:
            low = max(low, self.low + other.lowest_degree())
        if other.low != NEG_INF:
            low = max(low, other.low + self.lowest_degree())
        out: dict = {}
        for n, v in self.c.items():
            for m, w in other.c.items():
                k = n + m
                if k > top or k < low:
                    continue
                p = v * w
                u = out.get(k)
                out[k] = p if u is None else u + p
        return LaurentSeries(out, low, top)

    __rmul__ = __mul__

    def power(self, k: int) -> "LaurentSeries":
        acc = LaurentSeries.one()
        base = self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def inverse(self, terms: int) -> "LaurentSeries":
        """Multiplicative inverse, computed for ``terms`` coefficients.

        Standard recursion: with valuation N and leading coefficient a_N,
        b_{-N} = a_N^{-1} and
        b_{-N+p} = -a_N^{-1} * sum_{k<p} a_{N+p-k} b_{-N+k}.
        """
        if not self.c:
            raise NotAUnit("0 has no inverse")
        if terms < 1:
            raise ValueError("need at least one coefficient")
        n0 = min(self.c)
        inv0 = 1 / self.c[n0]
        out = {-n0: inv0}
        for p in range(1, terms):
            acc = Q(0)
            for k in range(p):
                a = self.c.get(n0 + p - k)
                if a is not None:
                    acc += a * out[-n0 + k]
            out[-n0 + p] = -inv0 * acc
        return LaurentSeries(out, NEG_INF, -n0 + terms - 1)

    def __repr__(self):
        if not self.c:
            return "0"
        parts = []
        for n in sorted(self.c):
            v = self.c[n]
            parts.append(str(v) if n == 0 else f"({v})*X^{n}")
        tail = "" if self.top == INF else f" + O(X^{int(self.top) + 1})"
        head = "" if self.low == NEG_INF else f"O(X^{int(self.low) - 1}..) + "
        return head + " + ".join(parts) + tail


def euler_step_product(n: int, mmax: int | None = None) -> LaurentSeries:
    """Exact expansion of ``(1 + X^{-1}/n)^n``.

    The binomial theorem gives degree ``-m`` coefficient ``C(n,m)/n^m``; the
    support reaches down to degree ``-n`` no matter how large ``n`` is,
    which is the escape the divergence argument rests on.  ``mmax`` only
    limits which degrees are *reported*; the product itself is exact.
    """
    if n < 1:
        raise ValueError("the Euler scheme needs n >= 1")
    full = LaurentSeries({-m: Q(math.comb(n, m), n**m) for m in range(n + 1)})
    if mmax is None:
        return full
    return LaurentSeries(
        {d: v for d, v in full.c.items() if d >= -mmax}, -mmax
    )


def coefficient_limit_check(m: int, n: int):
    """The degree ``-m`` coefficient, with its exact rational sandwich.

    Returns ``(value, lower_bound)`` where ``value = C(n,m)/n^m`` and the
    bounds ``1 - m(m-1)/(2n) <= value * m! <= 1`` hold for all ``n >= m``
    (the product form ``prod_j (1 - j/n)`` makes both sides elementary).
    """
    if n < m:
        raise ValueError("the sandwich needs n >= m")
    value = Q(math.comb(n, m), n**m)
    bound = 1 - Q(m * (m - 1), 2 * n)
    scaled = value * math.factorial(m)
    if not (bound <= scaled <= 1):
        raise AssertionError(f"sandwich violated at m={m}, n={n}")
    return value, bound


@dataclass(frozen=True)
class DivergenceReport:
    """Per-degree convergence next to order-unbounded support."""

    n_list: tuple
    lowest_degrees: tuple
    coefficients: dict  # degree -> tuple of values along n_list
    limits: dict  # degree -> 1/m!
    verdict: str


def divergence_witness(n_list, mmax: int = 5) -> DivergenceReport:
    """Tabulate the Euler partial products along ``n_list``.

    Exhibits the two facts whose conjunction rules out a limit in the
    Laurent field: every fixed degree converges (to ``1/m!``), while the
    lowest degree of the ``n``-th product is exactly ``-n``, strictly
    unbounded below.
    """
    n_list = tuple(n_list)
    lows = []
    coeffs = {-m: [] for m in range(mmax + 1)}
    for n in n_list:
        p = euler_step_product(n)
        lows.append(int(p.lowest_degree()))
        for m in range(mmax + 1):
            coeffs[-m].append(p.coeff(-m))
    for n, low in zip(n_list, lows):
        if low != -n:
            raise AssertionError(f"support of the n={n} product should reach -{n}")
    return DivergenceReport(
        n_list=n_list,
        lowest_degrees=tuple(lows),
        coefficients={d: tuple(v) for d, v in coeffs.items()},
        limits={-m: Q(1, math.factorial(m)) for m in range(mmax + 1)},
        verdict="pointwise convergent, order-unbounded",
    )
