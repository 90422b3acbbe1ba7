"""Formal pseudo-differential operators over a differential coefficient ring.

An operator is a finite sparse sum ``sum_a c_a D^a`` (``D`` = the ring
derivation, ``a`` ranging over integers, finitely many positive orders).
The product extends the Leibniz rule to negative powers of ``D``:

    (P o Q)_a = sum_{k>=0, b+g-k=a}  C(b, k) * c_b * D^k(d_g)

with the generalized binomial ``C(b, k) = b(b-1)...(b-k+1)/k!`` valid for
all integer ``b``.

Truncation bookkeeping.  Negative tails are infinite in general, so every
operator carries a *reliable depth* ``d``: stored coefficients exist only at
orders ``>= d`` and are exact there; anything below ``d`` is unknown and
dropped.  ``d = -inf`` marks a fully exact operator.  All operations
propagate depths conservatively, so an order is reported reliable only if no
unknown input coefficient could have contributed to it:

    depth(P o Q) = max(depth(P) + ord(Q), depth(Q) + ord(P)).

Recomputing anything with deeper inputs never changes coefficients at orders
above the reported depth.
"""

from __future__ import annotations

import math
from functools import lru_cache

from .errors import (
    DepthInsufficient,
    InsufficientDepth,
    NotAUnit,
    RingMismatch,
    UnsupportedRing,
)
from .rings import Q, GaussRational, Ring, RingElem

NEG_INF = float("-inf")


@lru_cache(maxsize=None)
def genbinom(beta: int, k: int) -> Q:
    """Generalized binomial coefficient beta(beta-1)...(beta-k+1)/k!."""
    if k < 0:
        return Q(0)
    if beta >= 0:
        return Q(math.comb(beta, k))
    return Q((-1) ** k * math.comb(-beta + k - 1, k))


class PsiOp:
    """Sparse formal pseudo-differential operator with tracked reliable depth."""

    __slots__ = ("ring", "coeffs", "depth")

    def __init__(self, ring: Ring, coeffs: dict, depth=NEG_INF):
        self.ring = ring
        self.depth = depth
        self.coeffs = {
            a: c for a, c in coeffs.items() if not c.is_zero() and a >= depth
        }

    @classmethod
    def _raw(cls, ring, coeffs, depth):
        self = object.__new__(cls)
        self.ring = ring
        self.coeffs = coeffs
        self.depth = depth
        return self

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, ring: Ring, depth=NEG_INF) -> "PsiOp":
        return cls._raw(ring, {}, depth)

    @classmethod
    def identity(cls, ring: Ring) -> "PsiOp":
        return cls._raw(ring, {0: ring.one()}, NEG_INF)

    @classmethod
    def const(cls, ring: Ring, elem) -> "PsiOp":
        return cls(ring, {0: elem})

    @classmethod
    def d(cls, ring: Ring, power: int = 1) -> "PsiOp":
        """The operator D^power."""
        return cls._raw(ring, {power: ring.one()}, NEG_INF)

    @classmethod
    def monomial(cls, ring: Ring, order: int, elem) -> "PsiOp":
        return cls(ring, {order: elem})

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def order(self):
        """Largest stored order, or -inf for the zero operator."""
        return max(self.coeffs) if self.coeffs else NEG_INF

    def min_order(self):
        return min(self.coeffs) if self.coeffs else NEG_INF

    def ord_bound(self):
        """Upper bound for the order of the true (untruncated) operator."""
        top = self.order()
        if self.depth != NEG_INF:
            top = max(top, self.depth - 1)
        return top

    def coeff(self, a: int) -> RingElem:
        c = self.coeffs.get(a)
        return c if c is not None else self.ring.zero()

    def support(self):
        return sorted(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        """Structural equality restricted to the common reliable window."""
        if not isinstance(other, PsiOp):
            return NotImplemented
        if self.ring != other.ring:
            return False
        w = max(self.depth, other.depth)
        for a in set(self.coeffs) | set(other.coeffs):
            if a < w:
                continue
            if self.coeffs.get(a) != other.coeffs.get(a):
                return False
        return True

    __hash__ = None

    def __repr__(self):
        if not self.coeffs:
            d = "" if self.depth == NEG_INF else f" (depth {int(self.depth)})"
            return f"0{d}"
        parts = []
        for a in sorted(self.coeffs, reverse=True):
            c = self.coeffs[a]
            if a == 0:
                parts.append(f"({c!r})")
            else:
                parts.append(f"({c!r})*D^{a}")
        d = "" if self.depth == NEG_INF else f" + O(D^{int(self.depth) - 1})"
        return " + ".join(parts) + d

    # -- linear structure ----------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, PsiOp):
            return NotImplemented
        if self.ring != other.ring:
            raise RingMismatch(f"ring mismatch: {self.ring.tag} vs {other.ring.tag}")
        depth = max(self.depth, other.depth)
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            u = out.get(a)
            if u is None:
                out[a] = c
            else:
                u = u + c
                if u.is_zero():
                    del out[a]
                else:
                    out[a] = u
        if depth != NEG_INF:
            out = {a: c for a, c in out.items() if a >= depth}
        return PsiOp._raw(self.ring, out, depth)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return PsiOp._raw(self.ring, {a: -c for a, c in self.coeffs.items()}, self.depth)

    def scale(self, s) -> "PsiOp":
        out = {}
        for a, c in self.coeffs.items():
            sc = c.scale(s)
            if not sc.is_zero():
                out[a] = sc
        return PsiOp._raw(self.ring, out, self.depth)

    def __mul__(self, other):
        if isinstance(other, PsiOp):
            return compose(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, PsiOp):
            return NotImplemented
        return self.scale(other)

    def map_coeffs(self, f) -> "PsiOp":
        """Apply ``f`` to every coefficient (depth preserved, zeros dropped)."""
        out = {}
        for a, c in self.coeffs.items():
            fc = f(c)
            if not fc.is_zero():
                out[a] = fc
        return PsiOp._raw(self.ring, out, self.depth)

    # -- truncation ----------------------------------------------------------

    def prune_to(self, floor) -> "PsiOp":
        """Drop stored orders below ``floor``; depth stays honest."""
        if floor == NEG_INF or not self.coeffs or min(self.coeffs) >= floor:
            return self
        out = {a: c for a, c in self.coeffs.items() if a >= floor}
        return PsiOp._raw(self.ring, out, max(self.depth, floor))

    # -- projections and residue ----------------------------------------------

    def plus_part(self) -> "PsiOp":
        """Restriction to orders >= 0 (the differential-operator part)."""
        out = {a: c for a, c in self.coeffs.items() if a >= 0}
        depth = NEG_INF if self.depth <= 0 else self.depth
        return PsiOp._raw(self.ring, out, depth)

    def minus_part(self) -> "PsiOp":
        """Restriction to orders <= -1 (the integral-operator part)."""
        out = {a: c for a, c in self.coeffs.items() if a < 0}
        return PsiOp._raw(self.ring, out, self.depth)

    def residue(self) -> RingElem:
        """Coefficient at order -1."""
        if self.depth > -1:
            raise InsufficientDepth(
                f"residue needs reliable depth <= -1, have {self.depth}"
            )
        return self.coeff(-1)

    def trace(self) -> RingElem:
        """Integration functional applied to the residue (a constant element)."""
        if not self.ring.supports_mean:
            raise UnsupportedRing(
                f"ring {self.ring.tag} has no invariant integration functional"
            )
        return self.residue().mean()


# -- multiplication ----------------------------------------------------------


def _natural_depth(P: PsiOp, Q: PsiOp):
    dp, dq = P.depth, Q.depth
    terms = []
    if dp != NEG_INF:
        terms.append(dp + Q.ord_bound())
    if dq != NEG_INF:
        terms.append(dq + P.ord_bound())
    return max(terms) if terms else NEG_INF


def compose(P: PsiOp, Q: PsiOp, floor=None) -> "PsiOp":
    """Associative product ``P o Q``.

    ``floor`` bounds the computation from below: output orders under it are
    dropped.  Without a floor, the product must terminate naturally (left
    factor purely differential, or right coefficients eventually killed by
    the derivation); otherwise ``DepthInsufficient`` is raised.
    """
    if P.ring != Q.ring:
        raise RingMismatch(f"ring mismatch: {P.ring.tag} vs {Q.ring.tag}")
    natural = _natural_depth(P, Q)
    eff = natural if floor is None else max(natural, floor)
    if not P.coeffs or not Q.coeffs:
        return PsiOp._raw(P.ring, {}, eff)
    np_, nq = max(P.coeffs), max(Q.coeffs)
    has_neg = min(P.coeffs) < 0
    if eff == NEG_INF and has_neg:
        if not all(b.derivation_nilpotent() for b in Q.coeffs.values()):
            raise DepthInsufficient(
                "composition has an infinite negative tail; supply a truncation depth"
            )
    k_window = None if eff == NEG_INF else np_ + nq - eff
    out: dict = {}
    derivs = Q.coeffs
    dropped = False
    k = 0
    while derivs:
        if not has_neg and k > np_:
            break
        if k_window is not None and k > k_window:
            dropped = True
            break
        items = list(derivs.items())
        for beta, a in P.coeffs.items():
            c = genbinom(beta, k)
            if not c:
                continue
            ac = a.scale(c)
            if ac.is_zero():
                continue
            for gamma, bk in items:
                alpha = beta + gamma - k
                if eff != NEG_INF and alpha < eff:
                    dropped = True
                    continue
                term = ac * bk
                if term.is_zero():
                    continue
                acc = out.get(alpha)
                if acc is None:
                    out[alpha] = term
                else:
                    acc = acc + term
                    if acc.is_zero():
                        del out[alpha]
                    else:
                        out[alpha] = acc
        k += 1
        nxt = {}
        for gamma, b in derivs.items():
            db = b.derive()
            if not db.is_zero():
                nxt[gamma] = db
        derivs = nxt
    depth = natural if not dropped else eff
    if depth != NEG_INF:
        out = {a: c for a, c in out.items() if a >= depth}
    return PsiOp._raw(P.ring, out, depth)


def bracket(P: PsiOp, Q: PsiOp, floor=None) -> PsiOp:
    """Commutator [P, Q] = PQ - QP."""
    return compose(P, Q, floor) - compose(Q, P, floor)


def r_bracket(P: PsiOp, Q: PsiOp, floor=None) -> PsiOp:
    """Split bracket [P,Q]_0 = [P_+, Q_+] - [P_-, Q_-]."""
    return bracket(P.plus_part(), Q.plus_part(), floor) - bracket(
        P.minus_part(), Q.minus_part(), floor
    )


def power(P: PsiOp, k: int, floor=None) -> PsiOp:
    """k-fold composition power, with power(P, 0) the identity."""
    if k < 0:
        raise ValueError("power expects a nonnegative exponent")
    acc = PsiOp.identity(P.ring)
    for _ in range(k):
        acc = compose(acc, P, floor)
    return acc


def psi_inverse(P: PsiOp, depth: int) -> PsiOp:
    """Two-sided inverse, computed down to the requested depth.

    The leading monomial ``a_N D^N`` is inverted exactly, the remainder by a
    terminating Neumann sum: with ``M = (a_N D^N)^{-1}`` one has
    ``M o P = 1 + K`` with ``ord(K) <= -1``, so
    ``P^{-1} = (sum (-K)^n) o M`` and every summand strictly lowers the
    order, which makes truncation at ``depth`` structural.
    """
    if not P.coeffs:
        raise NotAUnit("zero operator is not invertible")
    n = max(P.coeffs)
    a_n = P.coeffs[n]
    a_inv = a_n.invert()  # NotAUnit propagates
    inner = depth + n  # orders of the Neumann sum that still reach `depth` after o M
    m0 = compose(PsiOp.d(P.ring, -n), PsiOp.const(P.ring, a_inv), floor=depth)
    k_op = compose(m0, P, floor=inner) - PsiOp.identity(P.ring)
    if k_op.coeffs and max(k_op.coeffs) > -1:
        raise AssertionError("monomial peeling left terms of order >= 0")
    neg_k = -k_op
    acc = PsiOp.identity(P.ring)
    term = PsiOp.identity(P.ring)
    while True:
        term = compose(term, neg_k, floor=inner)
        if term.is_zero():
            break
        acc = acc + term
    return compose(acc, m0, floor=depth)


def pairing(P: PsiOp, Q: PsiOp) -> RingElem:
    """Symmetric trace pairing <P, Q> = Trace(P o Q)."""
    pq = compose(P, Q, floor=-1)
    return pq.trace()
