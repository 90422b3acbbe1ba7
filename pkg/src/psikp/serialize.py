"""JSON encodings for ring elements, operators and series.

Conventions:

* rationals are ``"p/q"`` strings (always with an explicit denominator);
* Gaussian rationals are two-element arrays ``[re, im]``;
* trigonometric polynomials are ``{"<frequency>": coefficient}`` objects,
  rational polynomials ``{"<degree>": coefficient}``;
* z-series are ``{"<power>": element, ..., "z_max": n}`` (``null`` for the
  unbounded window of exact constants);
* operators are ``{"ring": tag, "depth": d, "orders": {"<order>": element}}``
  with ``depth: null`` marking a fully exact operator;
* time monomials are ``{"<index>": exponent}`` and series are
  ``{"ring", "vMax", "barred", "floor", "terms": [{"monomial", "operator"}]}``.

Loading validates invariants (canonical coefficients are re-canonicalized;
a ``barred: true`` claim is checked, never silently normalized).
"""

from __future__ import annotations

import json

from .errors import FormatError, PredicateViolation
from .factorization import FactorPair
from .psido import NEG_INF, PsiOp
from .rings import (
    FOURIER,
    POLY,
    FourierElem,
    GaussRational,
    PolyElem,
    Q,
    Ring,
    ZSeriesElem,
    ring_from_tag,
)
from .tseries import TimeMonomial, TPsiSeries


def q_to_json(x) -> str:
    x = Q(x)
    return f"{x.numerator}/{x.denominator}"


def q_from_json(s) -> Q:
    try:
        if isinstance(s, int):
            return Q(s)
        return Q(s)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {s!r}") from exc


def gauss_to_json(g: GaussRational) -> list:
    return [q_to_json(g.re), q_to_json(g.im)]


def gauss_from_json(obj) -> GaussRational:
    if isinstance(obj, (str, int)):
        return GaussRational(q_from_json(obj))
    if not isinstance(obj, list) or len(obj) != 2:
        raise FormatError(f"Gaussian rational must be a 2-element array, got {obj!r}")
    return GaussRational(q_from_json(obj[0]), q_from_json(obj[1]))


def _int_key(s) -> int:
    try:
        return int(s)
    except (ValueError, TypeError) as exc:
        raise FormatError(f"bad integer key {s!r}") from exc


def elem_to_json(elem):
    if isinstance(elem, FourierElem):
        return {str(n): gauss_to_json(c) for n, c in sorted(elem.c.items())}
    if isinstance(elem, PolyElem):
        return {str(d): q_to_json(c) for d, c in sorted(elem.c.items())}
    if isinstance(elem, ZSeriesElem):
        out = {str(m): elem_to_json(c) for m, c in sorted(elem.c.items())}
        out["z_max"] = elem.zmax
        return out
    raise FormatError(f"unknown element type {type(elem).__name__}")


def elem_from_json(ring: Ring, obj):
    if not isinstance(obj, dict):
        raise FormatError("ring element must be a JSON object")
    if ring.is_z:
        zmax = obj.get("z_max", None)
        if zmax is not None and not isinstance(zmax, int):
            raise FormatError("z_max must be an integer or null")
        coeffs = {
            _int_key(k): elem_from_json(ring.base, v)
            for k, v in obj.items()
            if k != "z_max"
        }
        return ZSeriesElem(ring.base, coeffs, zmax)
    if ring == FOURIER:
        return FourierElem({_int_key(k): gauss_from_json(v) for k, v in obj.items()})
    if ring == POLY:
        return PolyElem({_int_key(k): q_from_json(v) for k, v in obj.items()})
    raise FormatError(f"unknown ring {ring.tag}")


def _depth_to_json(depth):
    return None if depth == NEG_INF else int(depth)


def _depth_from_json(obj):
    if obj is None:
        return NEG_INF
    if not isinstance(obj, int):
        raise FormatError("depth must be an integer or null")
    return obj


def op_to_json(op: PsiOp) -> dict:
    return {
        "ring": op.ring.tag,
        "depth": _depth_to_json(op.depth),
        "orders": {str(a): elem_to_json(c) for a, c in sorted(op.coeffs.items())},
    }


def op_from_json(obj, ring: Ring | None = None) -> PsiOp:
    if not isinstance(obj, dict) or "orders" not in obj:
        raise FormatError("operator must be an object with an 'orders' field")
    tag = obj.get("ring")
    if tag is not None:
        file_ring = ring_from_tag(tag)
        if ring is not None and file_ring != ring:
            raise FormatError(
                f"operator ring {file_ring.tag} does not match expected {ring.tag}"
            )
        ring = file_ring
    if ring is None:
        raise FormatError("operator needs a 'ring' tag")
    depth = _depth_from_json(obj.get("depth"))
    coeffs = {
        _int_key(a): elem_from_json(ring, e) for a, e in obj["orders"].items()
    }
    if coeffs and depth != NEG_INF and min(coeffs) < depth:
        raise FormatError("stored order below the declared reliable depth")
    return PsiOp(ring, coeffs, depth)


def monomial_to_json(m: TimeMonomial) -> dict:
    return {str(i): n for i, n in m.exps}


def monomial_from_json(obj) -> TimeMonomial:
    if not isinstance(obj, dict):
        raise FormatError("time monomial must be a JSON object")
    return TimeMonomial({_int_key(i): _int_key(n) for i, n in obj.items()})


def series_to_json(s: TPsiSeries) -> dict:
    return {
        "ring": s.ring.tag,
        "vMax": s.vmax,
        "barred": s.is_barred(),
        "floor": _depth_to_json(s.floor),
        "terms": [
            {"monomial": monomial_to_json(m), "operator": op_to_json(op)}
            for m, op in sorted(s.coeffs.items())
        ],
    }


def series_from_json(obj) -> TPsiSeries:
    if not isinstance(obj, dict) or "terms" not in obj:
        raise FormatError("series must be an object with a 'terms' list")
    ring = ring_from_tag(obj.get("ring", ""))
    vmax = obj.get("vMax")
    if not isinstance(vmax, int) or vmax < 0:
        raise FormatError("vMax must be a nonnegative integer")
    floor = _depth_from_json(obj.get("floor"))
    coeffs = {}
    for term in obj["terms"]:
        m = monomial_from_json(term.get("monomial", {}))
        op = op_from_json(term.get("operator", {}), ring)
        if m in coeffs:
            raise FormatError(f"duplicate monomial {m!r}")
        coeffs[m] = op
    out = TPsiSeries(ring, vmax, coeffs, floor)
    if obj.get("barred") and not out.is_barred():
        raise PredicateViolation(
            "series claims the valuation/order grading but violates it; "
            "refusing to normalize"
        )
    return out


def pair_to_json(pair: FactorPair) -> dict:
    return {
        "S": series_to_json(pair.s),
        "Y": series_to_json(pair.y),
        "residual_floor": _depth_to_json(pair.residual_floor),
    }


def pair_from_json(obj) -> FactorPair:
    if not isinstance(obj, dict) or "S" not in obj or "Y" not in obj:
        raise FormatError("factor pair must have 'S' and 'Y' fields")
    return FactorPair(
        s=series_from_json(obj["S"]),
        y=series_from_json(obj["Y"]),
        residual_floor=_depth_from_json(obj.get("residual_floor")),
    )


def dumps(obj) -> str:
    """Canonical JSON text (sorted keys, no float jitter possible: all exact)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
