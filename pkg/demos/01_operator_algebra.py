"""A tour of the exact operator algebra.

Operators are finite sparse sums of powers of the derivation D acting on
trigonometric polynomials with Gaussian-rational coefficients.  Negative
powers have infinite expansions, so truncated results carry a reliable
depth; everything above it is exact.
"""

from psikp import (
    FOURIER,
    PsiOp,
    bracket,
    compose,
    pairing,
    power,
    psi_inverse,
    sin_x,
)

D = PsiOp.d(FOURIER)
DINV = PsiOp.d(FOURIER, -1)
u = sin_x()

print("the Leibniz rule, exactly:")
print("  D o u =", compose(D, PsiOp.const(FOURIER, u)))
print("  [D, u] =", bracket(D, PsiOp.const(FOURIER, u)), " (= u')")

print("\nD and D^-1 are inverse to each other with no truncation at all:")
print("  D o D^-1 =", compose(D, DINV))

print("\npushing D^-1 past a coefficient produces an infinite tail;")
print("ask for a floor and the depth marker keeps the claim honest:")
t = compose(DINV, PsiOp.const(FOURIER, u), floor=-5)
print("  D^-1 o u =", t)
print("  composing back recovers u above the window:", compose(D, t))

print("\na Lax-shaped operator and its square:")
L = D + PsiOp.monomial(FOURIER, -1, u)
L2 = power(L, 2, floor=-4)
print("  L =", L)
print("  L^2 =", L2)
print("  residue of L^2 =", L2.residue(), " trace =", L2.trace())

print("\nthe trace kills brackets (the source of every conservation law):")
P = power(L, 2, floor=-6)
Qop = compose(PsiOp.const(FOURIER, u), DINV, floor=-6)
print("  Trace([L^2, u D^-1]) =", bracket(P, Qop, floor=-6).trace())

print("\nthe trace pairing is symmetric:")
print("  <L, u D^-1> =", pairing(L, Qop), " = <u D^-1, L> =", pairing(Qop, L))

print("\ninversion peels the leading monomial and sums a Neumann series:")
inv = psi_inverse(L, -4)
print("  L^-1 =", inv)
print("  L o L^-1 =", compose(L, inv, floor=-4))
