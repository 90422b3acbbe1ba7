"""Truncated series of operators over the multi-time monoid.

Time monomials are finitely supported exponent vectors ``t_1^{n_1} t_2^{n_2}
...`` graded by the valuation ``|t| = sum i*n_i``.  A ``TPsiSeries`` maps
monomials of valuation up to ``vmax`` to pseudo-differential operators; the
product is the monoid convolution with operator composition on slots.

The *barred* class is the workhorse: series whose order-``a`` coefficient
only appears in monomials of valuation at least ``a``, so every fixed
valuation carries a genuine finite-order operator.  Exponentials of families
``t_i P_i`` with ``ord(P_i) <= i`` land in that class, and so do products and
inverses of its members.

Certification of absent slots.  A slot missing from ``coeffs`` means "zero".
``floor`` records how far down that claim is reliable: an absent slot is
exactly zero at orders ``>= floor``.  Dropping a computed zero slot raises
``floor`` to that slot's reliable depth, so emptiness always comes with an
honest certificate; a fully exact series keeps ``floor = -inf``.
"""

from __future__ import annotations

from itertools import product as _cartesian

from .errors import (
    NotAUnit,
    NotInvertibleAtZero,
    OrderViolation,
    RingMismatch,
    TruncationMismatch,
)
from .psido import NEG_INF, PsiOp, compose, psi_inverse
from .rings import Q, Ring, is_one


class TimeMonomial:
    """Exponent vector in the time monoid, e.g. t1^2*t3."""

    __slots__ = ("exps",)

    def __init__(self, exps=()):
        if isinstance(exps, dict):
            items = exps.items()
        else:
            items = exps
        self.exps = tuple(sorted((i, n) for i, n in items if n))
        for i, n in self.exps:
            if i < 1 or n < 0:
                raise ValueError("indices start at 1 and exponents are nonnegative")

    @classmethod
    def one(cls) -> "TimeMonomial":
        return _T_ONE

    @classmethod
    def t(cls, i: int, n: int = 1) -> "TimeMonomial":
        return cls({i: n})

    @property
    def valuation(self) -> int:
        return sum(i * n for i, n in self.exps)

    def exponent(self, i: int) -> int:
        for j, n in self.exps:
            if j == i:
                return n
        return 0

    def __mul__(self, other: "TimeMonomial") -> "TimeMonomial":
        out = dict(self.exps)
        for i, n in other.exps:
            out[i] = out.get(i, 0) + n
        return TimeMonomial(out)

    def divides(self, other: "TimeMonomial") -> bool:
        theirs = dict(other.exps)
        return all(theirs.get(i, 0) >= n for i, n in self.exps)

    def div(self, other: "TimeMonomial") -> "TimeMonomial":
        """Componentwise difference self / other (other must divide self)."""
        out = dict(self.exps)
        for i, n in other.exps:
            if out.get(i, 0) < n:
                raise ValueError(f"{other!r} does not divide {self!r}")
            out[i] -= n
        return TimeMonomial(out)

    def splittings(self):
        """All ordered pairs (m1, m2) with m1 * m2 == self."""
        indices = [i for i, _ in self.exps]
        ranges = [range(n + 1) for _, n in self.exps]
        for pick in _cartesian(*ranges):
            m1 = TimeMonomial({i: j for i, j in zip(indices, pick)})
            yield m1, self.div(m1)

    def sort_key(self):
        return (self.valuation, self.exps)

    def __eq__(self, other):
        return isinstance(other, TimeMonomial) and self.exps == other.exps

    def __hash__(self):
        return hash(self.exps)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        if not self.exps:
            return "1"
        return "*".join(
            f"t{i}" if n == 1 else f"t{i}^{n}" for i, n in self.exps
        )


_T_ONE = TimeMonomial(())


def monomials_upto(vmax: int, indices) -> list[TimeMonomial]:
    """All monomials over the given indices with valuation <= vmax, sorted."""
    indices = sorted(set(indices))
    out = [{}]
    for i in indices:
        if i > vmax:
            break
        grown = []
        for base in out:
            used = sum(j * n for j, n in base.items())
            n = 1
            while used + i * n <= vmax:
                d = dict(base)
                d[i] = n
                grown.append(d)
                n += 1
        out.extend(grown)
    return sorted(TimeMonomial(d) for d in out)


class TPsiSeries:
    """Truncated operator-valued series over the time monoid."""

    __slots__ = ("ring", "vmax", "floor", "coeffs")

    def __init__(self, ring: Ring, vmax: int, coeffs: dict, floor=NEG_INF):
        self.ring = ring
        self.vmax = vmax
        slots = {}
        for m, op in coeffs.items():
            if m.valuation > vmax:
                continue
            if op.is_zero():
                floor = max(floor, op.depth)
            else:
                slots[m] = op
        self.coeffs = slots
        self.floor = floor

    # -- constructors --------------------------------------------------------

    @classmethod
    def one(cls, ring: Ring, vmax: int, floor=NEG_INF) -> "TPsiSeries":
        return cls(ring, vmax, {_T_ONE: PsiOp.identity(ring)}, floor)

    @classmethod
    def zero(cls, ring: Ring, vmax: int, floor=NEG_INF) -> "TPsiSeries":
        return cls(ring, vmax, {}, floor)

    @classmethod
    def from_op(cls, op: PsiOp, vmax: int, floor=NEG_INF) -> "TPsiSeries":
        """Embed an operator as the valuation-zero slot of a constant series."""
        return cls(op.ring, vmax, {_T_ONE: op}, floor)

    # -- queries ---------------------------------------------------------------

    def slot(self, m: TimeMonomial) -> PsiOp:
        op = self.coeffs.get(m)
        if op is not None:
            return op
        return PsiOp.zero(self.ring, depth=self.floor)

    def at_zero(self) -> PsiOp:
        return self.slot(_T_ONE)

    def monomials(self):
        return sorted(self.coeffs)

    def indices(self):
        out = set()
        for m in self.coeffs:
            out.update(i for i, _ in m.exps)
        return out

    def is_zero(self) -> bool:
        return not self.coeffs

    def depth(self):
        """Reported common reliable depth across slots (absent slots: floor)."""
        d = self.floor
        for op in self.coeffs.values():
            d = max(d, op.depth)
        return d

    def max_order(self):
        top = NEG_INF
        for op in self.coeffs.values():
            top = max(top, op.ord_bound())
        return top

    def __eq__(self, other):
        if not isinstance(other, TPsiSeries):
            return NotImplemented
        if self.ring != other.ring or self.vmax != other.vmax:
            return False
        for m in set(self.coeffs) | set(other.coeffs):
            if self.slot(m) != other.slot(m):
                return False
        return True

    __hash__ = None

    def __repr__(self):
        if not self.coeffs:
            return f"0 (vmax={self.vmax})"
        parts = [f"[{m!r}] {op!r}" for m, op in sorted(self.coeffs.items())]
        return f"TPsiSeries(vmax={self.vmax}):\n  " + "\n  ".join(parts)

    # -- linear structure -------------------------------------------------------

    def _check_compatible(self, other: "TPsiSeries"):
        if self.ring != other.ring:
            raise RingMismatch(
                f"ring mismatch: {self.ring.tag} vs {other.ring.tag}"
            )
        if self.vmax != other.vmax:
            raise TruncationMismatch(
                f"valuation truncations differ: {self.vmax} vs {other.vmax}"
            )

    def __add__(self, other):
        self._check_compatible(other)
        out = {}
        for m in set(self.coeffs) | set(other.coeffs):
            out[m] = self.slot(m) + other.slot(m)
        return TPsiSeries(self.ring, self.vmax, out, max(self.floor, other.floor))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return TPsiSeries(
            self.ring, self.vmax, {m: -op for m, op in self.coeffs.items()}, self.floor
        )

    def scale(self, s) -> "TPsiSeries":
        return TPsiSeries(
            self.ring,
            self.vmax,
            {m: op.scale(s) for m, op in self.coeffs.items()},
            self.floor,
        )

    def map_slots(self, f) -> "TPsiSeries":
        return TPsiSeries(
            self.ring, self.vmax, {m: f(op) for m, op in self.coeffs.items()}, self.floor
        )

    # -- truncation ---------------------------------------------------------------

    def truncate_val(self, vmax: int) -> "TPsiSeries":
        return TPsiSeries(
            self.ring,
            vmax,
            {m: op for m, op in self.coeffs.items() if m.valuation <= vmax},
            self.floor,
        )

    def prune_to(self, floor) -> "TPsiSeries":
        """Drop stored coefficient orders below ``floor`` in every slot."""
        return TPsiSeries(
            self.ring,
            self.vmax,
            {m: op.prune_to(floor) for m, op in self.coeffs.items()},
            self.floor,
        )

    # -- multiplication --------------------------------------------------------------

    def mul(self, other: "TPsiSeries", floor=None) -> "TPsiSeries":
        """Convolution product with operator composition on slots."""
        self._check_compatible(other)
        w = floor
        if w is None:
            w = max(self.floor, other.floor)
            w = w if w != NEG_INF else None
        out: dict = {}
        for m1, op1 in sorted(self.coeffs.items()):
            v1 = m1.valuation
            for m2, op2 in sorted(other.coeffs.items()):
                if v1 + m2.valuation > self.vmax:
                    continue
                m = m1 * m2
                prod = compose(op1, op2, floor=w)
                acc = out.get(m)
                out[m] = prod if acc is None else acc + prod
        f_out = self._mul_floor(other)
        if f_out != NEG_INF:
            pad = PsiOp.zero(self.ring, depth=f_out)
            out = {m: op + pad for m, op in out.items()}
        return TPsiSeries(self.ring, self.vmax, out, f_out)

    def _mul_floor(self, other):
        # absent slots are zero only down to the input floors; products with
        # present slots can pollute above them by the partner's order
        f = NEG_INF
        if self.floor != NEG_INF:
            f = max(f, self.floor + max(other.max_order(), 0))
        if other.floor != NEG_INF:
            f = max(f, other.floor + max(self.max_order(), 0))
        return f

    def __mul__(self, other):
        if isinstance(other, TPsiSeries):
            return self.mul(other)
        return self.scale(other)

    # -- calculus ------------------------------------------------------------------

    def dt(self, k: int) -> "TPsiSeries":
        """Formal derivative with respect to t_k; output vmax drops by k."""
        if k < 1:
            raise ValueError("time indices start at 1")
        vmax = max(self.vmax - k, 0)
        tk = TimeMonomial.t(k)
        out = {}
        for m, op in self.coeffs.items():
            n = m.exponent(k)
            if n:
                out[m.div(tk)] = op.scale(n)
        return TPsiSeries(self.ring, vmax, out, self.floor)

    def plus_part(self) -> "TPsiSeries":
        floor = NEG_INF if self.floor <= 0 else self.floor
        return TPsiSeries(
            self.ring,
            self.vmax,
            {m: op.plus_part() for m, op in self.coeffs.items()},
            floor,
        )

    def minus_part(self) -> "TPsiSeries":
        return TPsiSeries(
            self.ring,
            self.vmax,
            {m: op.minus_part() for m, op in self.coeffs.items()},
            self.floor,
        )

    # -- inversion ----------------------------------------------------------------

    def inverse(self, floor=None) -> "TPsiSeries":
        """Inverse series via the valuation-triangular recursion.

        The constant slot is inverted in the operator algebra; each further
        slot is ``-[U]_1^{-1} * sum_{m' m'' = m, m' != 1} [U]_{m'} [U^{-1}]_{m''}``.
        """
        w = floor if floor is not None else (self.floor if self.floor != NEG_INF else None)
        u0 = self.at_zero()
        if u0.is_zero():
            raise NotInvertibleAtZero("constant-in-time slot is zero")
        if u0 == PsiOp.identity(self.ring) and u0.depth == NEG_INF:
            inv0 = PsiOp.identity(self.ring)
        else:
            try:
                inv0 = psi_inverse(u0, w if w is not None else NEG_INF)
            except NotAUnit as exc:
                raise NotInvertibleAtZero(str(exc)) from exc
        out = {_T_ONE: inv0}
        universe = monomials_upto(self.vmax, self.indices())
        for m in universe:
            if m.valuation == 0:
                continue
            acc = None
            for m1, m2 in m.splittings():
                if m1.valuation == 0:
                    continue
                u1 = self.coeffs.get(m1)
                i2 = out.get(m2)
                if u1 is None or i2 is None:
                    continue
                term = compose(u1, i2, floor=w)
                acc = term if acc is None else acc + term
            if acc is not None and not acc.is_zero():
                out[m] = -compose(inv0, acc, floor=w)
        f_out = self.floor
        if f_out != NEG_INF:
            # at most vmax recursion levels can stack absent-slot pollution
            f_out = f_out + self.vmax * max(self.max_order(), 0)
            pad = PsiOp.zero(self.ring, depth=f_out)
            out = {m: op + pad for m, op in out.items()}
        return TPsiSeries(self.ring, self.vmax, out, f_out)

    # -- predicates ------------------------------------------------------------------

    def is_barred(self) -> bool:
        """Order of every slot bounded by its valuation."""
        return all(
            op.order() <= m.valuation for m, op in self.coeffs.items()
        )

    def in_unit_group(self) -> bool:
        """Barred, with constant-in-time slot of the shape 1 + (orders <= -1)."""
        if not self.is_barred():
            return False
        u0 = self.at_zero()
        if not is_one(u0.coeff(0)):
            return False
        return all(a <= 0 for a in u0.coeffs)

    def in_lower_group(self) -> bool:
        """Member of 1 + (orders <= -1) with arbitrary time dependence."""
        u0 = self.at_zero()
        if not is_one(u0.coeff(0)):
            return False
        if any(a > 0 for a in u0.coeffs):
            return False
        return all(
            op.order() <= -1
            for m, op in self.coeffs.items()
            if m.valuation > 0
        )

    def in_differential_group(self) -> bool:
        """Barred and purely differential with constant slot exactly 1."""
        if not self.is_barred():
            return False
        u0 = self.at_zero()
        if not is_one(u0.coeff(0)) or any(a != 0 for a in u0.coeffs):
            return False
        return all(op.min_order() >= 0 for op in self.coeffs.values())


def exp_series(family: dict[int, PsiOp], ring: Ring, vmax: int, floor=None) -> TPsiSeries:
    """Exponential ``exp(sum_i t_i P_i)`` truncated at valuation ``vmax``.

    Requires ``ord(P_i) <= i``, which makes the result barred: the
    order-``a`` part of the n-th power carries valuation at least ``a``.
    """
    slots = {}
    for i, op in family.items():
        if op.is_zero():
            continue
        if op.ring != ring:
            raise RingMismatch("family member ring differs from requested ring")
        if op.order() > i:
            raise OrderViolation(
                f"ord(P_{i}) = {op.order()} exceeds its time index {i}"
            )
        slots[TimeMonomial.t(i)] = op
    x = TPsiSeries(ring, vmax, slots)
    acc = TPsiSeries.one(ring, vmax)
    term = acc
    for n in range(1, vmax + 1):
        term = term.mul(x, floor=floor).scale(Q(1, n))
        if term.is_zero():
            break
        acc = acc + term
    return acc


class QSeriesOp:
    """Operator-valued polynomial in the scaling parameter q."""

    __slots__ = ("ring", "qmax", "coeffs", "floor")

    def __init__(self, ring: Ring, qmax: int, coeffs: dict, floor=NEG_INF):
        self.ring = ring
        self.qmax = qmax
        slots = {}
        for p, op in coeffs.items():
            if p < 0:
                raise ValueError("q-powers are nonnegative")
            if p > qmax:
                continue
            if op.is_zero():
                floor = max(floor, op.depth)
            else:
                slots[p] = op
        self.coeffs = slots
        self.floor = floor

    def slot(self, p: int) -> PsiOp:
        op = self.coeffs.get(p)
        return op if op is not None else PsiOp.zero(self.ring, depth=self.floor)

    def is_zero(self) -> bool:
        return not self.coeffs

    def max_order(self):
        top = NEG_INF
        for op in self.coeffs.values():
            top = max(top, op.ord_bound())
        return top

    def __eq__(self, other):
        if not isinstance(other, QSeriesOp):
            return NotImplemented
        if self.ring != other.ring:
            return False
        qm = min(self.qmax, other.qmax)
        return all(self.slot(p) == other.slot(p) for p in range(qm + 1))

    __hash__ = None

    def __add__(self, other):
        qm = min(self.qmax, other.qmax)
        out = {}
        for p in range(qm + 1):
            out[p] = self.slot(p) + other.slot(p)
        return QSeriesOp(self.ring, qm, out, max(self.floor, other.floor))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return QSeriesOp(
            self.ring, self.qmax, {p: -op for p, op in self.coeffs.items()}, self.floor
        )

    def scale(self, s) -> "QSeriesOp":
        return QSeriesOp(
            self.ring, self.qmax, {p: op.scale(s) for p, op in self.coeffs.items()},
            self.floor,
        )

    def shift(self, n: int) -> "QSeriesOp":
        """Multiply by q^n."""
        return QSeriesOp(
            self.ring,
            self.qmax,
            {p + n: op for p, op in self.coeffs.items()},
            self.floor,
        )

    def mul(self, other: "QSeriesOp", floor=None) -> "QSeriesOp":
        if self.ring != other.ring:
            raise RingMismatch("ring mismatch in q-series product")
        qm = min(self.qmax, other.qmax)
        w = floor
        if w is None:
            w = max(self.floor, other.floor)
            w = w if w != NEG_INF else None
        out: dict = {}
        for p1, op1 in self.coeffs.items():
            for p2, op2 in other.coeffs.items():
                p = p1 + p2
                if p > qm:
                    continue
                prod = compose(op1, op2, floor=w)
                acc = out.get(p)
                out[p] = prod if acc is None else acc + prod
        f_out = NEG_INF
        if self.floor != NEG_INF:
            f_out = max(f_out, self.floor + max(other.max_order(), 0))
        if other.floor != NEG_INF:
            f_out = max(f_out, other.floor + max(self.max_order(), 0))
        if f_out != NEG_INF:
            pad = PsiOp.zero(self.ring, depth=f_out)
            out = {p: op + pad for p, op in out.items()}
        return QSeriesOp(self.ring, qm, out, f_out)

    def power(self, k: int, floor=None) -> "QSeriesOp":
        acc = QSeriesOp(self.ring, self.qmax, {0: PsiOp.identity(self.ring)})
        for _ in range(k):
            acc = acc.mul(self, floor=floor)
        return acc

    def plus_part(self) -> "QSeriesOp":
        floor = NEG_INF if self.floor <= 0 else self.floor
        return QSeriesOp(
            self.ring, self.qmax, {p: op.plus_part() for p, op in self.coeffs.items()},
            floor,
        )

    def minus_part(self) -> "QSeriesOp":
        return QSeriesOp(
            self.ring, self.qmax, {p: op.minus_part() for p, op in self.coeffs.items()},
            self.floor,
        )

    def satisfies_q_grading(self) -> bool:
        """q-valuation of the order-``a`` coefficient is at least ``a``."""
        return all(op.order() <= p for p, op in self.coeffs.items())

    def __repr__(self):
        if not self.coeffs:
            return f"0 (qmax={self.qmax})"
        parts = [f"[q^{p}] {op!r}" for p, op in sorted(self.coeffs.items())]
        return f"QSeriesOp(qmax={self.qmax}):\n  " + "\n  ".join(parts)


def q_collect(series: TPsiSeries, shift: int = 0, qmax: int | None = None) -> QSeriesOp:
    """Scale t_n by q^n, then set every t_n = 1.

    Each monomial of valuation v lands in the q^(v+shift) slot; ``shift``
    accounts for a global q factor.  On valuation-homogeneous data this is
    information-preserving, and it is a ring homomorphism.
    """
    if qmax is None:
        qmax = series.vmax + shift
    out: dict = {}
    for m, op in series.coeffs.items():
        p = m.valuation + shift
        if p > qmax:
            continue
        acc = out.get(p)
        out[p] = op if acc is None else acc + op
    return QSeriesOp(series.ring, qmax, out, series.floor)
