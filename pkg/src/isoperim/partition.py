"""Registry of the nine dyadically-certified claims and their certificates.

Each claim pairs an exact dyadic region and a rational threshold with a tight
lower-bound function.  The bound functions evaluate terms at the region
endpoints that monotonicity dictates (minimizing endpoint for positive terms,
maximizing for subtracted ones), so the returned interval's lower endpoint
underestimates the true infimum over the box; repeated bisection then
certifies strict positivity above the threshold.

Certificates record the leaf tiling with hexadecimal floating-point endpoint
literals for bit-exact round trips, and can be independently re-checked:
every leaf bound is recomputed at the recorded precision and the leaves are
verified to tile the region exactly.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import gmpy2

from .interval import DomainError, Interval, const_sqrt2
from .gaussian import BellmanParams, default_params, j_deriv, j_deriv_abs, j_value
from .bellman import L_value, Q_d1, Q_value
from .report import Report, ReportItem
from .subdivide import Box, Leaf, SubdivisionResult, dyadic_certify, split_box

__all__ = [
    "ClaimSpec",
    "Certificate",
    "CLAIMS",
    "claim_ids",
    "get_claim",
    "bound_value",
    "verify_claim",
    "check_certificate",
    "verify_all",
    "DEFAULT_LADDER",
    "DEFAULT_MAX_DEPTH",
]

_F = Fraction
DEFAULT_LADDER: tuple[int, ...] = (64, 128, 256, 512)
DEFAULT_MAX_DEPTH = 60

# bound(box, params, prec) -> Interval; only the lower endpoint is load-bearing
BoundFn = Callable[[Box, BellmanParams, int], Interval]


@dataclass(frozen=True)
class ClaimSpec:
    id: str
    dim: int
    region: Box
    threshold: Fraction
    bound_fn: str
    note: str

    def __post_init__(self) -> None:
        if self.threshold <= 0:
            raise ValueError("claim threshold must be positive")
        if len(self.region) != self.dim:
            raise ValueError("region arity does not match claim dimension")
        for lo, hi in self.region:
            for v in (lo, hi):
                if v.denominator & (v.denominator - 1):
                    raise ValueError(f"region endpoint {v} is not dyadic")
            if lo >= hi:
                raise ValueError("empty region side")


# -- helper evaluations ------------------------------------------------------


def _pt(v: Fraction, prec: int) -> Interval:
    return Interval.point(v, prec)


def _jv(lo: Fraction, hi: Fraction, p: BellmanParams, prec: int) -> Interval:
    return j_value(_pt(lo, prec).hull(_pt(hi, prec)), p, prec)


# -- the nine bound functions ------------------------------------------------


def _bound_LJQ1(box: Box, p: BellmanParams, prec: int) -> Interval:
    (xl, xh), (yl, yh) = box
    d = _pt(yl, prec) - _pt(xh, prec)
    jb = _jv(yl, yh, p, prec)
    t1 = (d.square() + jb.square()).sqrt()
    t2 = d + (const_sqrt2(prec) - 1) * jb
    return t1.max_with(t2) + L_value(_pt(xl, prec)) - Q_value(_pt((xh + yh) / 2, prec)).double()


def _bound_LJQ2(box: Box, p: BellmanParams, prec: int) -> Interval:
    ((yl, yh),) = box
    jb = _jv(yl, yh, p, prec)
    return (
        _pt(yl - _F(1, 16), prec)
        + (const_sqrt2(prec) - 1) * jb
        + L_value(_pt(_F(1, 16), prec))
        - Q_value(_pt(_F(1, 32) + yh / 2, prec)).double()
    )


def _bound_LJ1(box: Box, p: BellmanParams, prec: int) -> Interval:
    ((cl, ch),) = box
    inner = _jv(2 * cl - _F(1, 4), 2 * ch - _F(1, 4), p, prec)
    outer = _jv(cl, ch, p, prec)
    return (
        _pt(2 * cl - _F(1, 2), prec)
        + (const_sqrt2(prec) - 1) * inner
        + L_value(_pt(_F(1, 4), prec))
        - outer.double()
    )


def _bound_QJQ1(box: Box, p: BellmanParams, prec: int) -> Interval:
    (xl, xh), (yl, yh) = box
    jy = j_value(_pt(yh, prec), p, prec)
    jdy = j_deriv(_pt(yh, prec), p, prec)
    q_term = Q_value(_pt((xl + yh) / 2, prec)).double() - Q_value(_pt(xl, prec))
    qd = Q_d1(_pt((xl + yl) / 2, prec))
    return _pt(yl, prec) - _pt(xh, prec) + jy * jdy - q_term * qd


def _bound_QJQ2(box: Box, p: BellmanParams, prec: int) -> Interval:
    (xl, xh), (yl, yh) = box
    d = _pt(yl, prec) - _pt(xh, prec)
    jb = _jv(yl, yh, p, prec)
    q_term = Q_value(_pt((xl + yh) / 2, prec)).double() - Q_value(_pt(xl, prec))
    return d.square() + jb.square() - q_term.square()


def _bound_QJ1(box: Box, p: BellmanParams, prec: int) -> Interval:
    (xl, xh), (yl, yh) = box
    ml, mh = (xl + yl) / 2, (xh + yh) / 2
    jm = _jv(ml, mh, p, prec)
    base = _pt(yl, prec) - _pt(xh, prec)
    # The J'-carrying term keeps its sign on either side of the maximizer x1.
    if mh < p.x1:
        base = base + (jm.double() - Q_value(_pt(xh, prec))) * j_deriv(_pt(mh, prec), p, prec)
    else:
        base = base - (jm.double() - Q_value(_pt(xl, prec))) * j_deriv_abs(
            _pt(ml, prec).hull(_pt(mh, prec)), p, prec
        )
    return base - (jm.double() - Q_value(_pt(xl, prec))) * Q_d1(_pt(xl, prec))


def _bound_QJ2(box: Box, p: BellmanParams, prec: int) -> Interval:
    (xl, xh), (yl, yh) = box
    d = _pt(yl, prec) - _pt(xh, prec)
    jy = j_value(_pt(yh, prec), p, prec)
    jm = _jv((xl + yl) / 2, (xh + yh) / 2, p, prec)
    return (d.square() + jy.square()).sqrt() + Q_value(_pt(xl, prec)) - jm.double()


def _bound_P1(box: Box, p: BellmanParams, prec: int) -> Interval:
    ((xl, xh),) = box
    one_minus = _pt(1 - xl, prec)
    half_sum = (L_value(_pt(xl, prec)) + j_value(one_minus, p, prec)).half()
    return half_sum - (_pt(xh, prec) * one_minus).double()


def _bound_P2(box: Box, p: BellmanParams, prec: int) -> Interval:
    ((xl, xh),) = box
    return (
        -(Q_d1(_pt(xl, prec)).half())
        + j_deriv(_pt(1 - xl, prec), p, prec).half()
        - _pt(xh, prec).scale2(2)
        + Interval.point(2, prec)
    )


_BOUND_FNS: dict[str, BoundFn] = {
    "underline_h_LJQ_1": _bound_LJQ1,
    "underline_h_LJQ_2": _bound_LJQ2,
    "underline_h_LJ_1": _bound_LJ1,
    "underline_h_QJQ_1": _bound_QJQ1,
    "underline_h_QJQ_2": _bound_QJQ2,
    "underline_h_QJ_1": _bound_QJ1,
    "underline_h_QJ_2": _bound_QJ2,
    "underline_h_P_1": _bound_P1,
    "underline_h_P_2": _bound_P2,
}

# Claims are data so the regions and thresholds can be audited at a glance.
CLAIMS: dict[str, ClaimSpec] = {
    c.id: c
    for c in (
        ClaimSpec(
            id="LJQ1", dim=2,
            region=((_F(1, 16), _F(1, 4)), (_F(1, 2), _F(3, 4))),
            threshold=_F(1, 10**6), bound_fn="underline_h_LJQ_1",
            note="two-point functional G[B] on the off-diagonal LJQ rectangle",
        ),
        ClaimSpec(
            id="LJQ2", dim=1,
            region=((_F(1, 2), _F(3, 4)),),
            threshold=_F(1, 10**4), bound_fn="underline_h_LJQ_2",
            note="boundary slice x = 1/16 of the LJQ region",
        ),
        ClaimSpec(
            id="LJ1", dim=1,
            region=((_F(1, 2), _F(5, 8)),),
            threshold=_F(1, 100), bound_fn="underline_h_LJ_1",
            note="LJ case on the u = c - 1/4 boundary, midpoint variable c",
        ),
        ClaimSpec(
            id="QJQ1", dim=2,
            region=((_F(1, 4), _F(1, 2)), (_F(1, 2), _F(33, 64))),
            threshold=_F(1, 10**5), bound_fn="underline_h_QJQ_1",
            note="y-derivative of the QJQ quadratic form near y = 1/2",
        ),
        ClaimSpec(
            id="QJQ2", dim=2,
            region=((_F(1, 4), _F(1, 2)), (_F(33, 64), _F(3, 4))),
            threshold=_F(1, 10**7), bound_fn="underline_h_QJQ_2",
            note="QJQ quadratic form away from y = 1/2",
        ),
        ClaimSpec(
            id="QJ1", dim=2,
            region=((_F(1, 4), _F(1, 2)), (_F(1, 2), _F(5, 8))),
            threshold=_F(1, 10**5), bound_fn="underline_h_QJ_1",
            note="negated x-derivative of the near-diagonal QJ form",
        ),
        ClaimSpec(
            id="QJ2", dim=2,
            region=((_F(1, 4), _F(1, 2)), (_F(5, 8), _F(1))),
            threshold=_F(1, 10**7), bound_fn="underline_h_QJ_2",
            note="far-from-diagonal QJ two-point functional",
        ),
        ClaimSpec(
            id="P1", dim=1,
            region=((_F(1, 64), _F(1, 4)),),
            threshold=_F(1, 10**4), bound_fn="underline_h_P_1",
            note="symmetrized L1 deficit, L branch",
        ),
        ClaimSpec(
            id="P2", dim=1,
            region=((_F(1, 4), _F(1, 2)),),
            threshold=_F(1, 10**4), bound_fn="underline_h_P_2",
            note="negated derivative of the symmetrized deficit, Q branch",
        ),
    )
}


def claim_ids() -> list[str]:
    return list(CLAIMS)


def get_claim(claim_id: str) -> ClaimSpec:
    try:
        return CLAIMS[claim_id]
    except KeyError:
        raise KeyError(f"unknown claim id: {claim_id!r}") from None


def bound_value(claim: ClaimSpec, box: Box, p: BellmanParams, prec: int) -> Interval:
    for (lo, hi), (rl, rh) in zip(box, claim.region):
        if lo < rl or hi > rh:
            raise DomainError(f"box {box} not inside region of claim {claim.id}")
    return _BOUND_FNS[claim.bound_fn](box, p, prec)


# -- certificates ------------------------------------------------------------


def _frac_to_hex(v: Fraction) -> str:
    prec = max(64, v.numerator.bit_length() + 4)
    m = gmpy2.mpfr(gmpy2.mpq(v.numerator, v.denominator), prec)
    if gmpy2.mpq(m) != gmpy2.mpq(v.numerator, v.denominator):
        raise ValueError(f"{v} is not exactly representable")
    return format(m, "a")


def _hex_to_frac(s: str) -> Fraction:
    q = gmpy2.mpq(gmpy2.mpfr(s, 1100))
    return Fraction(int(q.numerator), int(q.denominator))


def _mpfr_to_hex(v: gmpy2.mpfr) -> str:
    return format(v, "a")


@dataclass
class Certificate:
    claim_id: str
    w: Fraction
    precision_ladder: tuple[int, ...]
    threshold: Fraction
    leaves: list[Leaf]
    max_depth_reached: int
    status: str  # "verified" | "inconclusive"
    offending_box: Box | None = None

    def to_text(self) -> str:
        doc = {
            "claim_id": self.claim_id,
            "w": f"{self.w.numerator}/{self.w.denominator}",
            "precision_ladder": list(self.precision_ladder),
            "threshold": f"{self.threshold.numerator}/{self.threshold.denominator}",
            "status": self.status,
            "max_depth_reached": self.max_depth_reached,
            "leaves": [
                {
                    "box": [[_frac_to_hex(lo), _frac_to_hex(hi)] for lo, hi in leaf.box],
                    "bound_lo": _mpfr_to_hex(leaf.bound_lo),
                    "prec": leaf.prec,
                }
                for leaf in self.leaves
            ],
        }
        if self.offending_box is not None:
            doc["offending_box"] = [
                [_frac_to_hex(lo), _frac_to_hex(hi)] for lo, hi in self.offending_box
            ]
        return json.dumps(doc, indent=1, sort_keys=True)

    @staticmethod
    def from_text(text: str) -> "Certificate":
        doc = json.loads(text)
        leaves = [
            Leaf(
                box=tuple(
                    (_hex_to_frac(lo), _hex_to_frac(hi)) for lo, hi in entry["box"]
                ),
                bound_lo=gmpy2.mpfr(entry["bound_lo"], entry["prec"]),
                prec=entry["prec"],
            )
            for entry in doc["leaves"]
        ]
        off = None
        if "offending_box" in doc:
            off = tuple((_hex_to_frac(lo), _hex_to_frac(hi)) for lo, hi in doc["offending_box"])
        return Certificate(
            claim_id=doc["claim_id"],
            w=Fraction(doc["w"]),
            precision_ladder=tuple(doc["precision_ladder"]),
            threshold=Fraction(doc["threshold"]),
            leaves=leaves,
            max_depth_reached=doc["max_depth_reached"],
            status=doc["status"],
            offending_box=off,
        )


def verify_claim(
    claim: ClaimSpec | str,
    params: BellmanParams | None = None,
    max_depth: int = DEFAULT_MAX_DEPTH,
    ladder: Sequence[int] = DEFAULT_LADDER,
) -> Certificate:
    """Produce a certificate for one claim by recursive dyadic partitioning.

    The result is deterministic given (claim, params, max_depth, ladder).
    """
    if isinstance(claim, str):
        claim = get_claim(claim)
    p = params or default_params()
    fn = _BOUND_FNS[claim.bound_fn]
    result: SubdivisionResult = dyadic_certify(
        lambda box, prec: fn(box, p, prec),
        claim.region,
        claim.threshold,
        max_depth=max_depth,
        ladder=ladder,
    )
    return Certificate(
        claim_id=claim.id,
        w=p.w,
        precision_ladder=tuple(ladder),
        threshold=claim.threshold,
        leaves=result.leaves,
        max_depth_reached=result.max_depth_reached,
        status=result.status,
        offending_box=result.offending_box,
    )


def _tiling_ok(region: Box, leaves: list[Leaf]) -> bool:
    """Check that the leaf boxes tile the region exactly.

    Mirrors the subdivision: a box either is a leaf or splits into two halves
    that must both be tiled.  Because splitting is deterministic this
    recognizes exactly the tilings the verifier can produce.
    """
    remaining: dict[Box, int] = {}
    for leaf in leaves:
        remaining[leaf.box] = remaining.get(leaf.box, 0) + 1
    max_cells = 4 * len(leaves) + 8  # a valid tiling's recursion tree is linear in leaves

    def walk(box: Box) -> bool:
        nonlocal max_cells
        if remaining.get(box, 0) > 0:
            remaining[box] -= 1
            return True
        max_cells -= 1
        if max_cells < 0:
            return False
        left, right = split_box(box)
        return walk(left) and walk(right)

    import sys

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(200000)
    try:
        ok = walk(region)
    finally:
        sys.setrecursionlimit(old)
    return ok and all(v == 0 for v in remaining.values())


def check_certificate(cert: Certificate, params: BellmanParams | None = None) -> bool:
    """Independently re-verify a certificate.

    Recomputes the bound on every leaf at its recorded precision, requires the
    stored endpoint to match the recomputation exactly and clear the
    threshold, and checks that the leaves tile the region.
    """
    claim = get_claim(cert.claim_id)
    if cert.status != "verified":
        return False
    if cert.threshold != claim.threshold:
        return False
    p = params if params is not None and params.w == cert.w else BellmanParams.create(w=cert.w)
    thr = gmpy2.mpq(claim.threshold.numerator, claim.threshold.denominator)
    fn = _BOUND_FNS[claim.bound_fn]
    for leaf in cert.leaves:
        recomputed = fn(leaf.box, p, leaf.prec)
        if recomputed.lo != leaf.bound_lo:
            return False
        if not recomputed.lo > thr:
            return False
    return _tiling_ok(claim.region, cert.leaves)


# -- whole-suite driver ------------------------------------------------------


def _verify_claim_worker(args: tuple) -> tuple[str, str, float]:
    claim_id, w_str, prec, max_depth, ladder = args
    p = BellmanParams.create(w=Fraction(w_str), prec=prec)
    t0 = time.perf_counter()
    cert = verify_claim(get_claim(claim_id), p, max_depth, ladder)
    return claim_id, cert.to_text(), time.perf_counter() - t0


def verify_all(
    params: BellmanParams | None = None,
    max_depth: int = DEFAULT_MAX_DEPTH,
    ladder: Sequence[int] = DEFAULT_LADDER,
    jobs: int = 1,
    include_analytic: bool = True,
    claims: Sequence[str] | None = None,
) -> tuple[Report, dict[str, Certificate]]:
    """Run the registered claims (and the point-check suites) and aggregate.

    Parallelism is across claims; each certificate is produced by the same
    serial subdivision regardless of ``jobs``, so outputs are byte-identical.
    """
    p = params or default_params()
    ids = list(claims) if claims is not None else claim_ids()
    report = Report(
        name="dyadic-claims",
        fingerprint={"w": str(p.w), "max_depth": max_depth, "ladder": list(ladder)},
    )
    certs: dict[str, Certificate] = {}

    work = [(cid, f"{p.w.numerator}/{p.w.denominator}", p.prec, max_depth, tuple(ladder)) for cid in ids]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_verify_claim_worker, work))
    else:
        outcomes = [_verify_claim_worker(w) for w in work]

    for cid, text, seconds in outcomes:
        cert = Certificate.from_text(text)
        certs[cid] = cert
        claim = get_claim(cid)
        margin = None
        if cert.leaves:
            margin = float(min(leaf.bound_lo for leaf in cert.leaves)) - float(claim.threshold)
        report.add(
            ReportItem(
                id=f"claim-{cid}",
                status="pass" if cert.status == "verified" else "fail",
                margin=margin,
                depth=cert.max_depth_reached,
                seconds=seconds,
                detail=f"{len(cert.leaves)} leaves, threshold {claim.threshold}",
            )
        )

    if include_analytic:
        from . import analytic

        report.extend(analytic.verify_analytic_cases(p), prefix="analytic/")
    return report, certs
