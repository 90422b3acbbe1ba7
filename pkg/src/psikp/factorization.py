"""Unique splitting of invertible time-series operators.

Every series ``U`` whose constant-in-time slot is ``1 + (orders <= -1)`` and
which satisfies the valuation/order grading factors uniquely as

    U = S^{-1} * Y

with ``S = 1 + (strictly negative orders)`` and ``Y`` purely differential
with constant slot ``1``.  The solver finds ``S`` from ``(S o U)_- = 0`` by a
double induction: monomials in canonical order (valuation, then
lexicographic), and inside each slot descending operator order.  The linear
system is never transcribed by hand; each step re-expands ``S o U`` through
the operator product, so the binomial bookkeeping cannot drift from the
multiplication it must match.

After construction the residual ``(S U)_-`` is recomputed with the generic
series product and must vanish identically on its certified window; window
sizes are therefore checked assumptions, not trusted arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DepthInsufficient, PredicateViolation
from .psido import NEG_INF, PsiOp, compose
from .tseries import TimeMonomial, TPsiSeries, monomials_upto


@dataclass(frozen=True)
class FactorPair:
    """Factors of U = S^{-1} Y, plus the window the residual check covered."""

    s: TPsiSeries
    y: TPsiSeries
    residual_floor: float = NEG_INF

    def __iter__(self):
        return iter((self.s, self.y))


def factorize(U: TPsiSeries, depth: int | None = None) -> FactorPair:
    """Split ``U = S^{-1} Y``; factors exact down to ``depth``.

    With ``depth=None`` the composition is carried out exactly, which only
    terminates for inputs without infinite negative tails (e.g. purely
    differential series); otherwise ``DepthInsufficient`` asks for a depth.
    """
    if not U.in_unit_group():
        raise PredicateViolation(
            "input is not in the factorizable group: needs the valuation/order "
            "grading and a constant slot of the form 1 + (orders <= -1)"
        )
    ring = U.ring
    n_u = max(int(U.max_order()), 0) if U.coeffs else 0
    if depth is None:
        w = None
    else:
        w = depth - U.vmax - n_u
        if U.depth() > w:
            raise DepthInsufficient(
                f"factoring to depth {depth} needs the input reliable to "
                f"{w}, but it is only reliable to {U.depth()}"
            )
    u0 = U.at_zero()
    one = TimeMonomial.one()
    identity = PsiOp.identity(ring)
    solved: dict[TimeMonomial, PsiOp] = {}
    for m in monomials_upto(U.vmax, U.indices()):
        base = identity if m == one else PsiOp.zero(ring)
        resid = compose(base, u0, floor=w)
        for m1, m2 in m.splittings():
            if m1 == m:
                continue
            s1 = solved.get(m1)
            if s1 is None or s1.is_zero():
                continue
            resid = resid + compose(s1, U.slot(m2), floor=w)
        cur = base
        stop = w if w is not None else NEG_INF
        while True:
            reachable = [
                a for a in resid.coeffs if a <= -1 and a >= max(stop, resid.depth)
            ]
            if not reachable:
                break
            mu = max(reachable)
            term = PsiOp.monomial(ring, mu, -resid.coeffs[mu])
            cur = cur + term
            resid = resid + compose(term, u0, floor=w)
        slot_depth = max(stop, resid.depth)
        solved[m] = PsiOp(ring, cur.coeffs, depth=slot_depth)
    s = TPsiSeries(ring, U.vmax, solved)
    y_full = s.mul(U, floor=w)
    leftover = y_full.minus_part()
    if not leftover.is_zero():
        raise AssertionError(
            "factorization residual (S U)_- is nonzero on its reliable window"
        )
    y = y_full.plus_part()
    if depth is not None and s.depth() > depth:
        raise DepthInsufficient(
            f"solved factor only certified to {s.depth()}, wanted {depth}"
        )
    if not s.in_lower_group():
        raise AssertionError("factor S left its group")
    if not y.in_differential_group():
        raise AssertionError("factor Y left its group")
    return FactorPair(s=s, y=y, residual_floor=leftover.depth())


def recompose(pair: FactorPair) -> TPsiSeries:
    """Product S^{-1} Y of a factor pair."""
    s, y = pair.s, pair.y
    w = s.depth()
    floor = None if w == NEG_INF else w
    return s.inverse(floor=floor).mul(y, floor=floor)
