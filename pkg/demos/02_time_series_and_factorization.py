"""Graded time series, exponentials, and the group splitting.

Series over the time monoid are graded by the valuation |t| = sum i*n_i.
The workhorse class keeps the order of every slot below its valuation, so
each graded piece is a genuine finite-order operator.  Members whose
constant slot is 1 + (orders <= -1) split uniquely as S^{-1} Y with S lower
triangular and Y purely differential.
"""

from psikp import (
    FOURIER,
    PsiOp,
    TPsiSeries,
    TimeMonomial,
    exp_series,
    factorize,
    q_collect,
    recompose,
    sin_x,
)

D = PsiOp.d(FOURIER)

print("exp(t1 D) truncated at valuation 3:")
E = exp_series({1: D}, FOURIER, 3)
print(E)
print("graded (order <= valuation)?", E.is_barred())
print("purely differential with constant slot 1?", E.in_differential_group())

print("\nits inverse is the alternating geometric series:")
print(E.inverse())

print("\ncollecting by valuation (scale t_n by q^n, then set t_n = 1):")
q = q_collect(E)
print(q)
print("q-grading (q-valuation >= order)?", q.satisfies_q_grading())

print("\na series that is NOT differential:")
u = sin_x()
U = TPsiSeries.one(FOURIER, 3) + TPsiSeries(
    FOURIER, 3, {TimeMonomial.t(1): PsiOp.monomial(FOURIER, -1, u)}
)
print(U)

print("\nfactorize it: this one lies in the lower-triangular group itself,")
print("so uniqueness forces S = U^{-1} and Y = 1:")
pair = factorize(U, depth=-4)
print("S =", pair.s)
print("Y =", pair.y)
print("S equals U^{-1}?", pair.s == U.inverse(floor=-8))
print("recompose(S, Y) equals U?", recompose(pair) == U)

print("\na mixed member and its split:")
W = U.mul(exp_series({1: D, 2: PsiOp.d(FOURIER, 2)}, FOURIER, 3), floor=-9)
pw = factorize(W, depth=-4)
print("S =", pw.s)
print("Y supported on orders >= 0?", pw.y.in_differential_group())
print("roundtrip exact?", recompose(pw) == W)
