"""Why the operator algebra needs regularizing: an exact divergence.

In the Laurent field R((X)) the Euler scheme for the constant logarithmic
derivative X^{-1} produces the partial products (1 + X^{-1}/n)^n.  Each
fixed coefficient converges -- degree -m tends to 1/m! inside an exact
rational sandwich -- but the supports reach degree -n, escaping every member
of the field.  Substituting X = D^{-1} makes this the statement that the
exponential of the derivation cannot be reached by the Euler method inside
the operator algebra, which is what the graded time-series setting repairs.
"""

from psikp import Q, coefficient_limit_check, divergence_witness, euler_step_product

print("small cases, exactly:")
for n in (1, 2, 3):
    print(f"  (1 + X^-1/{n})^{n} =", euler_step_product(n))

print("\nthe sandwich 1 - m(m-1)/2n <= C(n,m) m!/n^m <= 1:")
import math

for m in (2, 3, 5):
    for n in (10, 100, 1000):
        value, bound = coefficient_limit_check(m, n)
        print(
            f"  m={m}, n={n}: value*{m}! = {value * math.factorial(m)}"
            f"  in [{bound}, 1]"
        )

print("\nfixed degree -2 converges to 1/2 while the support runs away:")
rep = divergence_witness([4, 16, 64, 256], mmax=2)
for n, low, v in zip(rep.n_list, rep.lowest_degrees, rep.coefficients[-2]):
    print(f"  n={n:>4}: coefficient {v}  lowest degree {low}")
print("limit of the -2 coefficient:", rep.limits[-2])
print("verdict:", rep.verdict)
