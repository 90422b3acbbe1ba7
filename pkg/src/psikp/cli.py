"""Command-line front end.

Subcommands: ``solve`` (Cauchy solve plus verification battery),
``factorize`` (group splitting of a stored series), ``dressing``
(order-by-order dressing of an initial datum), ``demo-euler`` (the
Laurent-field divergence table) and ``verify`` (re-check a stored report).

Exit codes: 0 all requested checks pass, 1 a check failed, 2 bad
configuration or input.  Failures emit machine-readable JSON with a stable
reason code.  Reports are deterministic for identical inputs up to the
``generated_at`` timestamp, which is excluded from the content hash.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import math
import sys

from . import kp, laurent, serialize
from .errors import NonZeroMean, PsikpError
from .factorization import factorize, recompose
from .psido import NEG_INF
from .rings import ZSeriesElem, ring_from_tag
from .tseries import TPsiSeries

SCHEMA = "psikp-report/1"
EMBED_CAP = 1 << 16  # bytes of canonical JSON per embedded exact object

CHECK_NAMES = ("lax", "zs", "logderiv", "conservation", "kp1", "shape", "dressing")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="psikp",
        description="exact truncated calculus for pseudo-differential operators "
        "and the KP hierarchy",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, io_in=True):
        if io_in:
            sp.add_argument("--in", dest="infile", required=True, help="input JSON file")
        sp.add_argument("--out", dest="outfile", help="output report path (default stdout)")

    sp = sub.add_parser("solve", help="solve the Cauchy problem and verify identities")
    common(sp)
    sp.add_argument("--ring", choices=["fourier", "poly", "fourier-z"])
    sp.add_argument("--zmax", type=int, help="z-series truncation order")
    sp.add_argument("--kmax", type=int, default=3)
    sp.add_argument("--vmax", type=int, default=3)
    sp.add_argument("--depth", type=int, default=-4)
    sp.add_argument("--checks", help="comma list among " + ",".join(CHECK_NAMES))

    sp = sub.add_parser("factorize", help="split a stored series as S^{-1} Y")
    common(sp)
    sp.add_argument("--ring", choices=["fourier", "poly", "fourier-z"])
    sp.add_argument("--depth", type=int, help="requested reliable depth of the factors")

    sp = sub.add_parser("dressing", help="dress an initial datum: S0 D S0^{-1} = L0")
    common(sp)
    sp.add_argument("--ring", choices=["fourier", "poly", "fourier-z"])
    sp.add_argument("--depth", type=int, default=-4)

    sp = sub.add_parser("demo-euler", help="Laurent-field Euler divergence table")
    common(sp, io_in=False)
    sp.add_argument("--nlist", default="10,100,1000", help="comma list of step counts")
    sp.add_argument("--mmax", type=int, default=5)
    sp.add_argument("--format", choices=["json", "csv"], default="json")

    sp = sub.add_parser("verify", help="re-check a stored report")
    common(sp)
    return p


def _fail(code: int, payload: dict) -> int:
    print(serialize.dumps({"error": payload}))
    return code


def _read(path: str):
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise PsikpError(f"cannot read {path}: {exc}") from exc


def _utcnow() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _content_hash(report: dict) -> str:
    trimmed = {
        k: v for k, v in report.items() if k not in ("generated_at", "content_sha256")
    }
    return hashlib.sha256(serialize.dumps(trimmed).encode()).hexdigest()


def _capped(obj_json: dict) -> dict:
    text = serialize.dumps(obj_json)
    if len(text) <= EMBED_CAP:
        return obj_json
    return {
        "omitted": True,
        "reason": "size-cap",
        "sha256": hashlib.sha256(text.encode()).hexdigest(),
    }


def _verdict_json(v: dict) -> dict:
    out = {}
    for key, val in v.items():
        if key == "residual":
            out["residual"] = _capped(serialize.series_to_json(val))
        elif key == "cases":
            out["cases"] = {lbl: _verdict_json(c) for lbl, c in val.items()}
        else:
            out[key] = val
    return out


def _finalize(report: dict, outfile: str | None) -> None:
    report["generated_at"] = _utcnow()
    report["content_sha256"] = _content_hash(report)
    text = serialize.dumps(report)
    if outfile:
        with open(outfile, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _truncate_zmax(op, zmax):
    if zmax is None:
        return op
    return op.map_coeffs(
        lambda c: c.truncate(zmax) if isinstance(c, ZSeriesElem) else c
    )


def _load_operator(args):
    raw = _read(args.infile)
    expected = ring_from_tag(args.ring) if getattr(args, "ring", None) else None
    op = serialize.op_from_json(serialize.loads(raw.decode()), expected)
    op = _truncate_zmax(op, getattr(args, "zmax", None))
    return op, hashlib.sha256(raw).hexdigest()


def cmd_solve(args) -> int:
    checks = None
    if args.checks:
        checks = [c.strip() for c in args.checks.split(",") if c.strip()]
        for c in checks:
            if c not in CHECK_NAMES:
                raise PsikpError(f"unknown check {c!r}")
    if args.kmax < 1 or args.vmax < 1 or args.depth > -1:
        raise PsikpError("need kmax >= 1, vmax >= 1, depth <= -1")
    if checks and "kp1" in checks and args.kmax < 3:
        raise PsikpError("the kp1 check needs kmax >= 3")
    if checks and "kp1" in checks and args.vmax < 4:
        raise PsikpError("the kp1 check has no content below vmax = 4")
    op, digest = _load_operator(args)
    if checks and "conservation" in checks and not op.ring.supports_mean:
        raise PsikpError(
            "the conservation check needs a ring with an integration functional"
        )
    sol = kp.kp_solve(op, kmax=args.kmax, vmax=args.vmax, depth=args.depth)
    report_obj = kp.verify_solution(sol, checks=checks)
    report = {
        "schema": SCHEMA,
        "command": "solve",
        "params": {
            "ring": op.ring.tag,
            "zmax": args.zmax,
            "kmax": args.kmax,
            "vmax": args.vmax,
            "depth": args.depth,
            "checks": sorted(report_obj.verdicts),
        },
        "input_sha256": digest,
        "input": serialize.op_to_json(op),
        "passed": report_obj.passed,
        "verdicts": {
            name: _verdict_json(v) for name, v in report_obj.verdicts.items()
        },
        "solution": _capped(serialize.series_to_json(sol.l)),
        "factors": _capped(serialize.pair_to_json(sol.factors)),
    }
    _finalize(report, args.outfile)
    return 0 if report_obj.passed else 1


def cmd_factorize(args) -> int:
    raw = _read(args.infile)
    series = serialize.series_from_json(serialize.loads(raw.decode()))
    if args.ring and series.ring != ring_from_tag(args.ring):
        raise PsikpError(f"input ring {series.ring.tag} does not match --ring")
    pair = factorize(series, depth=args.depth)
    roundtrip = recompose(pair) == series
    report = {
        "schema": SCHEMA,
        "command": "factorize",
        "params": {"ring": series.ring.tag, "vmax": series.vmax, "depth": args.depth},
        "input_sha256": hashlib.sha256(raw).hexdigest(),
        "passed": roundtrip,
        "verdicts": {
            "residual": {
                "pass": True,
                "certified_depth": None
                if pair.residual_floor == NEG_INF
                else int(pair.residual_floor),
            },
            "roundtrip": {"pass": roundtrip},
        },
        "factors": _capped(serialize.pair_to_json(pair)),
    }
    _finalize(report, args.outfile)
    return 0 if roundtrip else 1


def cmd_dressing(args) -> int:
    op, digest = _load_operator(args)
    report = {
        "schema": SCHEMA,
        "command": "dressing",
        "params": {"ring": op.ring.tag, "depth": args.depth},
        "input_sha256": digest,
    }
    try:
        s0 = kp.dressing(op, args.depth)
    except NonZeroMean as exc:
        report["passed"] = False
        report["verdicts"] = {"dressing": {"pass": False, "error": exc.payload()}}
        _finalize(report, args.outfile)
        return 1
    report["passed"] = True
    report["verdicts"] = {
        "dressing": {"pass": True, "orders": len(s0.coeffs) - 1}
    }
    report["dressing_operator"] = _capped(serialize.op_to_json(s0))
    _finalize(report, args.outfile)
    return 0


def cmd_demo_euler(args) -> int:
    try:
        n_list = [int(x) for x in args.nlist.split(",") if x.strip()]
    except ValueError as exc:
        raise PsikpError(f"bad --nlist: {exc}") from exc
    if not n_list or min(n_list) < 1 or args.mmax < 0:
        raise PsikpError("need positive step counts and mmax >= 0")
    rows = []
    for n in n_list:
        low = int(laurent.euler_step_product(n).lowest_degree())
        for m in range(min(args.mmax, n) + 1):
            value, bound = laurent.coefficient_limit_check(m, n)
            rows.append(
                {
                    "n": n,
                    "m": m,
                    "coefficient": serialize.q_to_json(value),
                    "scaled_by_m_factorial": serialize.q_to_json(
                        value * math.factorial(m)
                    ),
                    "lower_bound": serialize.q_to_json(bound),
                    "lowest_degree": low,
                }
            )
    witness = laurent.divergence_witness(n_list, mmax=args.mmax)
    if args.format == "csv":
        lines = ["n,m,coefficient,scaled_by_m_factorial,lower_bound,lowest_degree"]
        for r in rows:
            lines.append(
                f"{r['n']},{r['m']},{r['coefficient']},"
                f"{r['scaled_by_m_factorial']},{r['lower_bound']},{r['lowest_degree']}"
            )
        text = "\n".join(lines)
        if args.outfile:
            with open(args.outfile, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return 0
    report = {
        "schema": SCHEMA,
        "command": "demo-euler",
        "params": {"nlist": n_list, "mmax": args.mmax},
        "passed": True,
        "rows": rows,
        "verdict": witness.verdict,
        "lowest_degrees": list(witness.lowest_degrees),
    }
    _finalize(report, args.outfile)
    return 0


def _recheck_verdict(v: dict, want_depth) -> bool:
    if "cases" in v:
        return all(_recheck_verdict(c, want_depth) for c in v["cases"].values())
    res = v.get("residual")
    if res is None or res.get("omitted"):
        return True
    series = serialize.series_from_json(res)
    ok = series.is_zero()
    bound = v.get("depth_bound")
    cert = v.get("certified_depth")  # None encodes "exact", below any bound
    if bound is not None and cert is not None and cert > bound:
        ok = False
    recorded = v.get("pass")
    return ok == recorded


def cmd_verify(args) -> int:
    raw = _read(args.infile)
    report = serialize.loads(raw.decode())
    if not isinstance(report, dict) or report.get("schema") != SCHEMA:
        raise PsikpError("not a psikp report")
    stored = report.get("content_sha256")
    if stored != _content_hash(report):
        print(serialize.dumps({"verify": "content hash mismatch"}))
        return 1
    ok = True
    for name, v in report.get("verdicts", {}).items():
        if not _recheck_verdict(v, report.get("params", {}).get("depth")):
            ok = False
            print(serialize.dumps({"verify": f"verdict {name} inconsistent"}))
    if ok:
        print(serialize.dumps({"verify": "ok", "passed": report.get("passed")}))
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    handlers = {
        "solve": cmd_solve,
        "factorize": cmd_factorize,
        "dressing": cmd_dressing,
        "demo-euler": cmd_demo_euler,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except PsikpError as exc:
        return _fail(2, exc.payload())


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
