"""Exact truncated calculus for formal pseudo-differential operators.

Layers, bottom up:

* `rings` -- exact differential coefficient rings (trigonometric
  polynomials over Gaussian rationals, rational polynomials, truncated
  z-series over either);
* `psido` -- the operator algebra: composition, bracket, inversion,
  projections, residue, trace, pairing, with reliable-depth bookkeeping;
* `tseries` -- graded series over the multi-time monoid, exponentials,
  inversion, formal time derivatives, q-collection;
* `factorization` -- the unique splitting U = S^{-1} Y into a
  1 + (negative orders) factor and a purely differential factor;
* `kp` -- the KP hierarchy: Cauchy solve by factorization, the residual
  verification battery, Hamiltonians, dressing, the KP-I scalar reduction,
  and an independent Picard-style integrator;
* `laurent` -- the rational Laurent field and the Euler-method divergence;
* `cli` -- the command-line front end and JSON formats (`serialize`).
"""

from .errors import (
    DepthInsufficient,
    FormatError,
    InsufficientDepth,
    InsufficientKMax,
    NonZeroMean,
    NotAUnit,
    NotInvertibleAtZero,
    OrderViolation,
    PredicateViolation,
    PsikpError,
    RingMismatch,
    TruncationMismatch,
    UnsupportedRing,
)
from .factorization import FactorPair, factorize, recompose
from .kp import (
    KPSolution,
    SolveReport,
    dressing,
    functional_derivative,
    hamiltonian,
    kp1_residual,
    kp_solve,
    lax_residual,
    log_deriv_residual,
    picard_solve,
    verify_solution,
    zs_residual,
)
from .laurent import (
    LaurentSeries,
    coefficient_limit_check,
    divergence_witness,
    euler_step_product,
)
from .psido import PsiOp, bracket, compose, pairing, power, psi_inverse, r_bracket
from .rings import (
    FOURIER,
    FOURIER_Z,
    POLY,
    POLY_Z,
    FourierElem,
    GaussRational,
    PolyElem,
    Q,
    Ring,
    ZSeriesElem,
    cos_x,
    fourier,
    poly,
    sin_x,
    zseries,
)
from .tseries import QSeriesOp, TimeMonomial, TPsiSeries, exp_series, q_collect

__version__ = "0.1.0"
