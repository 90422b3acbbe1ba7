"""The KP hierarchy at finite truncation: solve, dress, verify.

The Cauchy problem ``dL/dt_k = [(L^k)_+, L]``, ``L(0) = L0 = D + (orders <=
-1)``, is solved by factoring the exponential of the initial flows:

    U = exp(sum_k t_k L0^k) = S^{-1} Y,      L = Y L0 Y^{-1} = S L0 S^{-1}.

Everything here is a finite, exact computation: series are truncated at a
valuation ``vmax`` and operators at a reliable depth, and every claimed
identity is re-checked as a residual object that must vanish identically on
its certified window.  The verification battery covers the Lax flows, the
zero-curvature system, the logarithmic-derivative identities for both
factors, conservation of the trace Hamiltonians, the solution shape, the
KP-I scalar reduction, and the order-by-order dressing of the initial datum.

An independent Picard-type integrator (`picard_solve`) builds the solution
monomial by monomial straight from the flow equations, without any
factorization, and is used as a cross-check oracle for uniqueness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    InsufficientDepth,
    InsufficientKMax,
    NonZeroMean,
    PredicateViolation,
    TruncationMismatch,
)
from .factorization import FactorPair, factorize
from .psido import NEG_INF, PsiOp, compose, power, psi_inverse
from .rings import GaussRational, Q, Ring, is_one
from .tseries import (
    QSeriesOp,
    TimeMonomial,
    TPsiSeries,
    exp_series,
    monomials_upto,
    q_collect,
)


def validate_initial(op: PsiOp) -> None:
    """Check the shape D + sum_{a<=-1} u_a D^a of an initial datum."""
    if op.order() != 1:
        raise PredicateViolation("initial datum must have order exactly 1")
    if not is_one(op.coeff(1)):
        raise PredicateViolation("leading coefficient of the initial datum must be 1")
    if not op.coeff(0).is_zero():
        raise PredicateViolation("initial datum must have no order-0 term")


def series_power(L: TPsiSeries, k: int, floor=None) -> TPsiSeries:
    acc = TPsiSeries.one(L.ring, L.vmax)
    for _ in range(k):
        acc = acc.mul(L, floor=floor)
    return acc


def series_bracket(A: TPsiSeries, B: TPsiSeries, floor=None) -> TPsiSeries:
    return A.mul(B, floor=floor) - B.mul(A, floor=floor)


def _working_floor(L: TPsiSeries):
    f = L.depth()
    return None if f == NEG_INF else int(f)


@dataclass(frozen=True)
class KPSolution:
    """Solution triple of one truncated Cauchy solve."""

    l: TPsiSeries
    factors: FactorPair
    initial: PsiOp
    kmax: int
    vmax: int
    depth: int

    def __iter__(self):
        return iter((self.l, self.factors))


def kp_solve(L0: PsiOp, kmax: int, vmax: int, depth: int) -> KPSolution:
    """Solve the Cauchy problem at truncation (kmax, vmax, depth).

    The returned operator series is reliable at least ``kmax + 1`` orders
    below ``depth``, so that every residual of the verification battery is
    itself certified down to ``depth``.  Window sizes are checked: if the
    internal margins ever prove too small, the factorization raises instead
    of silently delivering unreliable coefficients.
    """
    validate_initial(L0)
    if kmax < 1 or vmax < 1 or depth > -1:
        raise PredicateViolation("need kmax >= 1, vmax >= 1, depth <= -1")
    ring = L0.ring
    target_s = depth - 1
    d_l = depth - kmax - 1
    wp = target_s - 3 * vmax
    powers = {k: power(L0, k, floor=wp) for k in range(1, kmax + 1)}
    u = exp_series(powers, ring, vmax, floor=wp)
    pair = factorize(u, depth=target_s)
    l0c = TPsiSeries.from_op(L0, vmax)
    y_inv = pair.y.inverse()
    l = pair.y.mul(l0c).mul(y_inv, floor=d_l)
    d_series = TPsiSeries.from_op(PsiOp.d(ring), vmax)
    if not (l - d_series).plus_part().is_zero():
        raise AssertionError("solution left the affine space D + (orders <= -1)")
    s_floor = _working_floor(pair.s)
    s_conj = pair.s.mul(l0c).mul(pair.s.inverse(floor=s_floor), floor=d_l)
    if s_conj != l:
        raise AssertionError("conjugation routes disagree: S L0 S^-1 != Y L0 Y^-1")
    return KPSolution(l=l, factors=pair, initial=L0, kmax=kmax, vmax=vmax, depth=depth)


# -- residual battery ---------------------------------------------------------


def lax_residual(L: TPsiSeries, k: int, floor=None) -> TPsiSeries:
    """dL/dt_k - [(L^k)_+, L], truncated to valuation vmax - k.

    The check window is empty when k exceeds vmax: the t_k-derivative would
    need slots the truncation does not hold, so no honest statement exists.
    """
    if k > L.vmax:
        raise TruncationMismatch(
            f"flow k={k} has no checkable window at vmax={L.vmax}"
        )
    f = floor if floor is not None else _working_floor(L)
    v2 = max(L.vmax - k, 0)
    bk = series_power(L, k, floor=f).plus_part().truncate_val(v2)
    lt = L.truncate_val(v2)
    return L.dt(k) - series_bracket(bk, lt, floor=f)


def zs_residual(L: TPsiSeries, i: int, j: int, floor=None) -> TPsiSeries:
    """Zero-curvature residual d_j (L^i)_+ - d_i (L^j)_+ + [(L^i)_+, (L^j)_+]."""
    if max(i, j) > L.vmax:
        raise TruncationMismatch(
            f"pair ({i},{j}) has no checkable window at vmax={L.vmax}"
        )
    f = floor if floor is not None else _working_floor(L)
    v2 = max(L.vmax - max(i, j), 0)
    bi = series_power(L, i, floor=f).plus_part()
    bj = series_power(L, j, floor=f).plus_part()
    return (
        bi.dt(j).truncate_val(v2)
        - bj.dt(i).truncate_val(v2)
        + series_bracket(bi.truncate_val(v2), bj.truncate_val(v2), floor=f)
    )


def log_deriv_residual(pair: FactorPair, L: TPsiSeries, k: int, floor=None):
    """Pair of residuals (dY/dt_k Y^{-1} - (L^k)_+,  dS/dt_k S^{-1} + (L^k)_-)."""
    if k > L.vmax:
        raise TruncationMismatch(
            f"flow k={k} has no checkable window at vmax={L.vmax}"
        )
    f = floor if floor is not None else _working_floor(L)
    v2 = max(L.vmax - k, 0)
    lk = series_power(L, k, floor=f)
    y_inv = pair.y.inverse().truncate_val(v2)
    s_floor = _working_floor(pair.s)
    s_inv = pair.s.inverse(floor=s_floor).truncate_val(v2)
    first = pair.y.dt(k).mul(y_inv) - lk.plus_part().truncate_val(v2)
    second = pair.s.dt(k).mul(s_inv, floor=f) + lk.minus_part().truncate_val(v2)
    return first, second


def conjugation_residual(sol: KPSolution) -> TPsiSeries:
    """Y L0 Y^{-1} - S L0 S^{-1}, zero by the solver identity."""
    l0c = TPsiSeries.from_op(sol.initial, sol.vmax)
    s = sol.factors.s
    f = _working_floor(s)
    d_l = sol.depth - sol.kmax - 1
    conj = s.mul(l0c).mul(s.inverse(floor=f), floor=d_l)
    return sol.l - conj


def hamiltonian(L, k: int, floor=None):
    """H_k = (1/k) Trace(L^{k+1}); on series, applied slot by slot.

    On a solution series every monomial of positive valuation vanishes: the
    H_k are conserved along all flows.
    """
    if k < 1:
        raise ValueError("Hamiltonian index starts at 1")
    if isinstance(L, PsiOp):
        f = floor if floor is not None else (-2 if L.depth == NEG_INF else None)
        p = power(L, k + 1, floor=f)
        return p.trace().scale(Q(1, k))
    f = floor if floor is not None else _working_floor(L)
    p = series_power(L, k + 1, floor=f)
    ring = L.ring
    return p.map_slots(lambda op: PsiOp.const(ring, op.trace())).scale(Q(1, k))


def _is_plain_scalar(a) -> bool:
    return isinstance(a, (int, type(Q(0)), GaussRational))


def functional_derivative(coeffs, P: PsiOp, floor=None) -> PsiOp:
    """Gradient of f(mu) = sum_k a_k Trace(P^k): sum_k a_k k P^{k-1}.

    Coefficients may be plain scalars or constant ring elements.
    """
    out = PsiOp.zero(P.ring)
    pk = PsiOp.identity(P.ring)  # holds P^{k-1}
    for k, a in enumerate(coeffs):
        if k >= 2:
            pk = compose(pk, P, floor=floor)
        if k == 0:
            continue
        if _is_plain_scalar(a):
            term = pk.scale(a).scale(k)
        else:
            term = pk.map_coeffs(lambda c: c * a).scale(k)
        out = out + term
    return out


def trace_polynomial_derivative_oracle(coeffs, P: PsiOp, Qop: PsiOp, floor=None):
    """First-order coefficient in eps of sum_k a_k Trace((P + eps Q)^k).

    Independent route for the functional-derivative contract: expand the
    words with exactly one Q factor and trace them.
    """
    word_floor = -2 if floor is None else min(floor, -2)
    total = P.ring.zero()
    for k, a in enumerate(coeffs):
        if k == 0:
            continue
        for j in range(k):
            word = compose(
                compose(power(P, j, floor=floor), Qop, floor=floor),
                power(P, k - 1 - j, floor=floor),
                floor=word_floor,
            )
            t = word.trace()
            total = total + (t.scale(a) if _is_plain_scalar(a) else t * a)
    return total


def dressing(L0: PsiOp, depth: int) -> PsiOp:
    """Order-by-order dressing S0 with S0 D S0^{-1} = L0, down to ``depth``.

    Each step antiderives the current defect of ``S0 D - L0 S0``; over the
    circle this is obstructed whenever the defect has nonzero mean, which at
    the first step is exactly the zero-mean condition on the initial field.
    """
    validate_initial(L0)
    if depth > -1:
        raise ValueError("depth must be <= -1")
    ring = L0.ring
    d_op = PsiOp.d(ring)
    s0 = PsiOp.identity(ring)
    f = depth - 1
    for n in range(1, -depth + 1):
        resid = compose(s0, d_op, floor=f) - compose(L0, s0, floor=f)
        if -n < resid.depth:
            raise InsufficientDepth("dressing defect not reliable at the next order")
        rhs = resid.coeff(-n)
        try:
            s_n = rhs.antiderive()
        except NonZeroMean as exc:
            raise NonZeroMean(
                f"dressing obstructed at step {n}: defect has nonzero mean",
                mean=exc.mean,
                step=n,
            ) from None
        if not s_n.is_zero():
            s0 = s0 + PsiOp.monomial(ring, -n, s_n)
    s0 = PsiOp(ring, s0.coeffs, depth=depth)  # the true tail below is unknown
    check = compose(compose(s0, d_op, floor=depth), psi_inverse(s0, depth), floor=depth)
    if check != L0:
        raise AssertionError("dressing verification failed: S0 D S0^{-1} != L0")
    return s0


# -- KP-I scalar reduction ------------------------------------------------------


def field_series(L: TPsiSeries) -> TPsiSeries:
    """The scalar field: coefficient of D^{-1} of every slot, as a series
    of order-zero operators.  Extracted values are exact."""
    ring = L.ring
    if L.floor > -1:
        raise InsufficientDepth("order -1 coefficients not certified on empty slots")

    def pick(op: PsiOp) -> PsiOp:
        if op.depth > -1:
            raise InsufficientDepth("order -1 coefficient not reliable")
        return PsiOp.const(ring, op.coeff(-1))

    out = L.map_slots(pick)
    return TPsiSeries(ring, L.vmax, out.coeffs, NEG_INF)


def _sderive(series: TPsiSeries) -> TPsiSeries:
    return series.map_slots(lambda op: op.map_coeffs(lambda c: c.derive()))


def kp1_residual(L: TPsiSeries, kmax: int) -> TPsiSeries:
    """Scalar KP-I residual (3/4) u_yy - d_x(u_t - (1/4) u_xxx - 3 u_x u).

    Identifies y = t_2, t = t_3, u = the D^{-1} coefficient of L.  Complete
    through valuation vmax - 4 (the double t_2-derivative consumes four
    valuation units).
    """
    if kmax < 3:
        raise InsufficientKMax("the KP-I reduction needs the t_3 flow (kmax >= 3)")
    if L.vmax < 4:
        raise TruncationMismatch(
            "the double t_2-derivative leaves no content below vmax = 4"
        )
    u = field_series(L)
    u_yy = u.dt(2).dt(2)  # complete through vmax - 4
    u_t = u.dt(3)  # complete through vmax - 3
    v1 = u_t.vmax
    u_x = _sderive(u)
    u_xxx = _sderive(_sderive(u_x))
    inner = (
        u_t
        - u_xxx.truncate_val(v1).scale(Q(1, 4))
        - u_x.mul(u).truncate_val(v1).scale(3)
    )
    v_out = u_yy.vmax
    return u_yy.scale(Q(3, 4)) - _sderive(inner).truncate_val(v_out)


def component_series(L: TPsiSeries, order: int) -> TPsiSeries:
    """Coefficient of D^order of every slot, as a scalar (order-zero) series."""
    ring = L.ring

    def pick(op: PsiOp) -> PsiOp:
        if op.depth > order:
            raise InsufficientDepth(f"order {order} coefficient not reliable")
        return PsiOp.const(ring, op.coeff(order))

    out = L.map_slots(pick)
    floor = NEG_INF if L.floor <= order else L.floor
    return TPsiSeries(ring, L.vmax, out.coeffs, floor)


def kp1_zs_reduction(L: TPsiSeries) -> TPsiSeries:
    """Scalar reduction of the (2,3) zero-curvature residual.

    With g1, g0 the order-1 and order-0 components of ``zs_residual(L,2,3)``,
    the combination

        -(1/4) d_y g1 + (1/4) d_x^2 g1 - (1/2) d_x g0

    equals ``kp1_residual(L)`` for *every* series of the Lax shape, solution
    or not; the auxiliary coefficients eliminate identically.  Checking the
    two routes against each other on generic data pins the scalar constants.
    """
    if L.vmax < 5:
        raise TruncationMismatch("the reduction identity needs vmax >= 5 for content")
    zs = zs_residual(L, 2, 3)
    g1 = component_series(zs, 1)
    g0 = component_series(zs, 0)
    # the extra t_2-derivative costs two more valuation units than kp1_residual
    v_out = max(L.vmax - 5, 0)
    return (
        g1.dt(2).scale(Q(-1, 4)).truncate_val(v_out)
        + _sderive(_sderive(g1)).scale(Q(1, 4)).truncate_val(v_out)
        - _sderive(g0).scale(Q(1, 2)).truncate_val(v_out)
    )


def _as_gauss_rows(series_list):
    """Parallel coefficient extraction: one exact row per populated slot."""
    keys = set()
    for s in series_list:
        for m, op in s.coeffs.items():
            elem = op.coeff(0)
            if hasattr(elem, "base"):
                for zp, comp in elem.c.items():
                    keys.update((m, zp, n) for n in comp.c)
            else:
                keys.update((m, None, n) for n in elem.c)
    rows = []
    for key in sorted(keys, key=repr):
        m, zp, n = key
        row = []
        for s in series_list:
            elem = s.slot(m).coeff(0)
            if zp is not None:
                elem = elem.c.get(zp, elem.base.zero()) if hasattr(elem, "base") else elem
            c = elem.c.get(n)
            if c is None:
                row.append(GaussRational(0))
            elif isinstance(c, GaussRational):
                row.append(c)
            else:
                row.append(GaussRational(c))
        rows.append(row)
    return rows


KP1_CONSTANTS = (
    GaussRational(Q(3, 4)),
    GaussRational(-1),
    GaussRational(Q(1, 4)),
    GaussRational(3),
)


def kp1_constant_fit(L: TPsiSeries):
    """Coefficient vectors annihilating the four KP-I candidate terms.

    Builds the scalar series u_yy, d_x u_t, d_x u_xxx, d_x(u_x u) on the
    given data and returns an exact basis of the homogeneous solutions.  On
    solve output the expected vector (3/4, -1, 1/4, 3) must lie in the span;
    the kernel can be larger at small truncations, which is why the pinning
    oracle is `kp1_zs_reduction` on generic data, not this fit.
    """
    u = field_series(L)
    v_out = max(L.vmax - 4, 0)
    u_x = _sderive(u)
    cols = [
        u.dt(2).dt(2).truncate_val(v_out),
        _sderive(u.dt(3)).truncate_val(v_out),
        _sderive(_sderive(_sderive(u_x))).truncate_val(v_out),
        _sderive(u_x.mul(u)).truncate_val(v_out),
    ]
    rows = _as_gauss_rows(cols)
    kernel = _nullspace(rows, 4)
    return kernel


def _nullspace(rows, ncols):
    """Exact nullspace basis of a small Gaussian-rational matrix."""
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(mat)):
            if mat[i][c]:
                pr = i
                break
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = mat[r][c].invert()
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [GaussRational(0)] * ncols
        vec[fc] = GaussRational(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -mat[i][fc]
        basis.append(vec)
    return basis


# -- independent integrator -------------------------------------------------------


def picard_solve(L0: PsiOp, kmax: int, vmax: int, depth: int) -> TPsiSeries:
    """Brute-force integration of the flows, one valuation at a time.

    Each monomial coefficient is read off the flow equation for its smallest
    active time index:

        (n_k + 1) [L]_{m t_k} = [[(L^k)_+, L]]_m

    using only already-determined lower-valuation slots.  No factorization is
    involved, so bitwise agreement with `kp_solve` output is a genuine
    two-route check.
    """
    validate_initial(L0)
    ring = L0.ring
    wf = depth - kmax - 1
    one = TimeMonomial.one()
    slots: dict[TimeMonomial, PsiOp] = {one: L0}
    universe = monomials_upto(vmax, range(1, kmax + 1))
    for v in range(1, vmax + 1):
        partial = TPsiSeries(ring, vmax, dict(slots))
        flows = {}
        for k in range(1, min(kmax, v) + 1):
            bk = series_power(partial, k, floor=wf).plus_part()
            flows[k] = series_bracket(bk, partial, floor=wf)
        for m in universe:
            if m.valuation != v:
                continue
            k = min(i for i, n in m.exps if n)
            m0 = m.div(TimeMonomial.t(k))
            op = flows[k].slot(m0).scale(Q(1, m0.exponent(k) + 1))
            if not op.is_zero():
                slots[m] = op
    return TPsiSeries(ring, vmax, slots)


# -- q-scaled identities ------------------------------------------------------------


def q_scaled_solution(L: TPsiSeries) -> QSeriesOp:
    """Scale t_n by q^n, set t_n = 1, multiply by a global q.

    The global factor aligns the gradings: the order-``a`` coefficient of the
    result has q-valuation at least ``a``.
    """
    return q_collect(L, shift=1)


def q_scaled_lax_residual(L: TPsiSeries, k: int, floor=None) -> QSeriesOp:
    """Componentwise scaled flow: q^{k+1} collect(dL/dt_k) = [(Lq^k)_+, Lq]."""
    f = floor if floor is not None else _working_floor(L)
    lq = q_scaled_solution(L)
    lqk = lq.power(k, floor=f)
    rhs = lqk.plus_part().mul(lq, floor=f) - lq.mul(lqk.plus_part(), floor=f)
    lhs = q_collect(L.dt(k), shift=k + 1, qmax=lq.qmax)
    return lhs - rhs


# -- verification battery -------------------------------------------------------------


@dataclass
class SolveReport:
    """Per-check verdicts with embedded exact residual objects."""

    params: dict
    verdicts: dict = field(default_factory=dict)
    solution: TPsiSeries | None = None
    factors: FactorPair | None = None

    @property
    def passed(self) -> bool:
        return all(v.get("pass") for v in self.verdicts.values())


def _verdict(residual: TPsiSeries, want_depth=None, **extra):
    nonzero = len(residual.coeffs)
    cert = residual.depth()
    ok = nonzero == 0
    if want_depth is not None and cert > want_depth:
        ok = False
    out = {
        "pass": ok,
        "nonzero_slots": nonzero,
        "certified_depth": None if cert == NEG_INF else int(cert),
        "depth_bound": want_depth,
        "residual": residual,
    }
    out.update(extra)
    return out


def default_checks(sol: KPSolution) -> list[str]:
    checks = ["lax", "zs", "logderiv", "shape"]
    if sol.l.ring.supports_mean:
        checks.append("conservation")
    if sol.kmax >= 3 and sol.vmax >= 4:
        checks.append("kp1")
    return checks


def verify_solution(sol: KPSolution, checks=None) -> SolveReport:
    """Run the requested identity checks and collect exact verdicts."""
    if checks is None:
        checks = default_checks(sol)
    report = SolveReport(
        params={
            "ring": sol.l.ring.tag,
            "kmax": sol.kmax,
            "vmax": sol.vmax,
            "depth": sol.depth,
        },
        solution=sol.l,
        factors=sol.factors,
    )
    want = sol.depth
    k_top = min(sol.kmax, sol.vmax)  # deeper flows have no checkable window
    for name in checks:
        if name == "lax":
            cases = {
                f"k={k}": _verdict(lax_residual(sol.l, k), want_depth=want)
                for k in range(1, k_top + 1)
            }
            report.verdicts["lax"] = _combine(cases)
        elif name == "zs":
            cases = {
                f"i={i},j={j}": _verdict(zs_residual(sol.l, i, j))
                for i in range(1, k_top + 1)
                for j in range(i + 1, k_top + 1)
            }
            report.verdicts["zs"] = _combine(cases)
        elif name == "logderiv":
            cases = {}
            for k in range(1, k_top + 1):
                first, second = log_deriv_residual(sol.factors, sol.l, k)
                cases[f"plus,k={k}"] = _verdict(first)
                cases[f"minus,k={k}"] = _verdict(second, want_depth=want)
            report.verdicts["logderiv"] = _combine(cases)
        elif name == "conservation":
            cases = {}
            for k in range(1, sol.kmax + 1):
                ham = hamiltonian(sol.l, k)
                moving = TPsiSeries(
                    ham.ring,
                    ham.vmax,
                    {m: op for m, op in ham.coeffs.items() if m.valuation >= 1},
                    ham.floor,
                )
                value = ham.at_zero().coeff(0)
                cases[f"k={k}"] = _verdict(moving, value=repr(value))
            report.verdicts["conservation"] = _combine(cases)
        elif name == "shape":
            d_series = TPsiSeries.from_op(PsiOp.d(sol.l.ring), sol.vmax)
            cases = {
                "affine": _verdict((sol.l - d_series).plus_part()),
                "conjugation": _verdict(conjugation_residual(sol), want_depth=want),
            }
            report.verdicts["shape"] = _combine(cases)
        elif name == "kp1":
            res = kp1_residual(sol.l, sol.kmax)
            kern = kp1_constant_fit(sol.l)
            verdict = _verdict(
                res,
                covered_valuation=res.vmax,
                constants=[repr(c) for c in KP1_CONSTANTS],
                kernel_dim=len(kern),
            )
            report.verdicts["kp1"] = verdict
        elif name == "dressing":
            try:
                s0 = dressing(sol.initial, sol.depth)
                report.verdicts["dressing"] = {
                    "pass": True,
                    "orders": len(s0.coeffs) - 1,
                    "certified_depth": int(s0.depth),
                }
            except NonZeroMean as exc:
                report.verdicts["dressing"] = {
                    "pass": False,
                    "error": exc.payload(),
                }
        else:
            raise ValueError(f"unknown check {name!r}")
    return report


def _combine(cases: dict) -> dict:
    return {"pass": all(c["pass"] for c in cases.values()), "cases": cases}


def _normalize_vec(vec):
    lead = next((c for c in vec if c), None)
    if lead is None:
        return vec
    inv = lead.invert()
    return [c * inv for c in vec]


def _normalize_kernel(kernel):
    return sorted([_normalize_vec(v) for v in kernel], key=repr)
