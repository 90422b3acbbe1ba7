"""Dressing the initial datum, and the classical KP-I equation.

Dressing looks for S0 = 1 + (lower order) with S0 D S0^{-1} = L0, built one
order at a time by antiderivation.  Over the circle each step needs the
current defect to have zero mean; the first such condition is exactly the
zero-mean condition on the field, and for real fields the third step
obstructs on mean(u0^2).

The order -1 coefficient of a solution solves the scalar KP-I equation
(3/4) u_yy - d_x (u_t - (1/4) u_xxx - 3 u_x u) = 0 with y = t_2, t = t_3;
the constants are pinned by reducing the zero-curvature residual on data
that does NOT solve anything.
"""

from psikp import FOURIER, NonZeroMean, PsiOp, fourier, kp_solve, sin_x
from psikp.kp import dressing, kp1_residual, kp1_zs_reduction
from psikp.rings import GaussRational, Q
from psikp.tseries import TPsiSeries, TimeMonomial, monomials_upto

import random

print("dressing a single complex mode: no obstruction at any depth")
u = fourier({1: 1})
L0 = PsiOp.d(FOURIER) + PsiOp.monomial(FOURIER, -1, u)
s0 = dressing(L0, -5)
print("  S0 =", s0)

print("\na real field obstructs at the third step (mean of u0^2):")
L0r = PsiOp.d(FOURIER) + PsiOp.monomial(FOURIER, -1, sin_x())
try:
    dressing(L0r, -4)
except NonZeroMean as exc:
    print(f"  step {exc.step}: offending mean = {exc.mean!r}")

print("\na nonzero-mean field obstructs immediately:")
L0m = PsiOp.d(FOURIER) + PsiOp.monomial(FOURIER, -1, FOURIER.coerce(1))
try:
    dressing(L0m, -3)
except NonZeroMean as exc:
    print(f"  step {exc.step}: offending mean = {exc.mean!r}")

print("\nKP-I: residual of the solve output vanishes...")
u0 = fourier({1: GaussRational(0, Q(-1, 2)), -1: GaussRational(0, Q(1, 2)), 2: 1})
sol = kp_solve(PsiOp.d(FOURIER) + PsiOp.monomial(FOURIER, -1, u0), kmax=3, vmax=5, depth=-6)
r = kp1_residual(sol.l, 3)
print("  zero:", r.is_zero(), " through valuation", r.vmax)

print("\n...and the scalar constants are not taken on faith: on random data")
print("the formula must match the reduction of the zero-curvature residual:")
rng = random.Random(5)


def rnd_elem():
    return fourier({rng.randint(-2, 2): GaussRational(Q(rng.randint(-3, 3), 2))})


slots = {TimeMonomial.one(): PsiOp.d(FOURIER) + PsiOp(FOURIER, {-1: rnd_elem(), -2: rnd_elem()}, -8)}
for m in monomials_upto(6, [1, 2, 3]):
    if m.valuation:
        slots[m] = PsiOp(FOURIER, {-1: rnd_elem(), -2: rnd_elem(), -3: rnd_elem()}, -8)
generic = TPsiSeries(FOURIER, 6, slots)
lhs = kp1_residual(generic, 3)
rhs = kp1_zs_reduction(generic)
print("  generic data, residual nonzero:", not rhs.is_zero())
print("  two routes agree exactly:", lhs.truncate_val(rhs.vmax) == rhs)
