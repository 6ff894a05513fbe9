"""The piecewise Bellman function and the two-point functionals.

The candidate function is

    B_w(x) = L(x)   on [0, 1/4]
           = Q(x)   on [1/4, 1/2]
           = J_w(x) on [1/2, 1]

with L(x) = x sqrt(log2(1/x)) and Q the unique cubic with Q(0) = Q(1) = 0,
Q(1/2) = 1/2, Q(1/4) = 2^{-3/2}.  Q's coefficients are carried exactly in the
field extension by sqrt(2) and converted to intervals once per precision, so
coefficient rounding never contributes enclosure width.

The two-point functionals are

    G1[B](x, y) = sqrt((y-x)^2 + B(y)^2) + B(x) - 2 B((x+y)/2)
    G2[B](x, y) = y - x + (sqrt2 - 1) B(y) + B(x) - 2 B((x+y)/2)
    G = max(G1, G2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .interval import (
    DEFAULT_PREC,
    DomainError,
    Interval,
    const_ln2,
    const_sqrt2,
    _dn,
    _up,
)
from .gaussian import BellmanParams, default_params, j_value
from .report import Report, ReportItem
from .subdivide import certify_sign

__all__ = [
    "QCoeffs",
    "PiecewiseBellman",
    "L_value",
    "L_d1",
    "L_d2",
    "L_d3",
    "Q_value",
    "Q_d1",
    "Q_d2",
    "B_value",
    "G1_value",
    "G2_value",
    "G_value",
    "certify_lemma_L",
    "certify_lemma_Q",
    "scan_B_above_L",
]

_F = Fraction


def _log2_inv(x: Interval) -> Interval:
    """log2(1/x) for x with positive lower endpoint."""
    return -(x.log2())


# -- L ----------------------------------------------------------------------


def _L_point(v: Fraction | gmpy2.mpfr, prec: int) -> Interval:
    q = gmpy2.mpq(v) if isinstance(v, gmpy2.mpfr) else gmpy2.mpq(v.numerator, v.denominator)
    if q == 0 or q == 1:
        return Interval.zero(prec)
    x = Interval.point(v, prec)
    return x * _log2_inv(x).sqrt()


_CRIT_CACHE: dict = {}


def _L_crit(prec: int) -> Interval:
    """Enclosure of the maximizer e^{-1/2} of L."""
    c = _CRIT_CACHE.get(prec)
    if c is None:
        c = (-Interval.point(_F(1, 2), prec)).exp()
        _CRIT_CACHE[prec] = c
    return c


def L_value(x: Interval, prec: int | None = None) -> Interval:
    """Enclosure of L(x) = x sqrt(log2(1/x)) over x in [0, 1]."""
    prec = prec or x.prec
    if x.lo < 0 or x.hi > 1:
        raise DomainError(f"L argument {x} not within [0, 1]")
    if x.hi == 0 or x.lo == 1:
        return Interval.zero(prec)
    zero = gmpy2.mpfr(0, prec)
    # Monotone on either side of the maximizer; the global lower endpoint over
    # a fat box is attained at one of the two input endpoints.
    if not x.is_point():
        ends = []
        for v in (x.lo, x.hi):
            q = gmpy2.mpq(v)
            ends.append(zero if (q <= 0 or q >= 1) else _L_point(v, prec).lo)
        lo = min(ends)
    else:
        lo = zero

    crit = _L_crit(prec)
    if x.hi <= crit.lo:  # increasing piece
        hi = _L_point(x.hi, prec).hi if x.hi != 0 else zero
    elif x.lo >= crit.hi:  # decreasing piece
        hi = _L_point(x.lo, prec).hi if x.lo != 1 else zero
    else:  # straddles the maximum; evaluate L over the critical enclosure
        hi = (crit * _log2_inv(crit).sqrt()).hi
    if not x.is_point():
        return Interval._mk(lo, max(lo, hi), prec)
    # thin input: keep the tight endpoint evaluation
    pt = _L_point(x.lo, prec)
    return Interval._mk(max(pt.lo, zero), max(pt.hi, zero), prec)


def _check_interior(x: Interval, name: str) -> None:
    if x.lo <= 0 or x.hi >= 1:
        raise DomainError(f"{name} requires an argument inside (0, 1), got {x}")


def L_d1(x: Interval, prec: int | None = None) -> Interval:
    """L'(x) = sqrt(t) - 1/(2 ln2 sqrt(t)), t = log2(1/x); strictly decreasing."""
    prec = prec or x.prec
    _check_interior(x, "L'")

    def pt(v):
        t = _log2_inv(Interval.point(v, prec))
        s = t.sqrt()
        return s - 1 / (const_ln2(prec).double() * s)

    b = pt(x.hi)
    a = b if x.is_point() else pt(x.lo)
    return Interval._mk(min(a.lo, b.lo), max(a.hi, b.hi), prec)


def L_d2(x: Interval, prec: int | None = None) -> Interval:
    """L''(x) = -(1/(x ln2)) (t^{-1/2}/2 + t^{-3/2}/(4 ln2)), t = log2(1/x)."""
    prec = prec or x.prec
    _check_interior(x, "L''")
    ln2 = const_ln2(prec)
    t = _log2_inv(x)
    s = t.sqrt()
    inner = (1 / s).half() + (1 / (t * s)) / ln2.scale2(2)
    return -(inner / (x * ln2))


def L_d3(x: Interval, prec: int | None = None) -> Interval:
    """Closed-form third derivative of L (positive on (0, e^{-sqrt3/2}))."""
    prec = prec or x.prec
    _check_interior(x, "L'''")
    ln2 = const_ln2(prec)
    t = _log2_inv(x)
    s = t.sqrt()
    t32 = 1 / (t * s)
    t52 = t32 / t
    c1 = 1 / ln2.scale2(2)  # 1/(4 ln2)
    bracket = (1 / s).half() + c1 * t32 - ((t32 / 4) + c1 * t52 * _F(3, 2)) / ln2
    return bracket / (ln2 * x.square())


# -- Q ----------------------------------------------------------------------


@dataclass(frozen=True)
class QCoeffs:
    """Polynomial coefficients as exact elements r + s*sqrt(2)."""

    pairs: tuple[tuple[Fraction, Fraction], ...]  # ascending powers, no constant term handling

    def derivative(self) -> "QCoeffs":
        return QCoeffs(
            tuple(
                (self.pairs[i][0] * i, self.pairs[i][1] * i)
                for i in range(1, len(self.pairs))
            )
        )

    def intervals(self, prec: int) -> tuple[Interval, ...]:
        key = (self.pairs, prec)
        cached = _QCOEFF_CACHE.get(key)
        if cached is None:
            s2 = const_sqrt2(prec)
            cached = tuple(
                Interval.point(r, prec) + Interval.point(s, prec) * s2
                for r, s in self.pairs
            )
            _QCOEFF_CACHE[key] = cached
        return cached

    def eval(self, x: Interval, prec: int | None = None) -> Interval:
        prec = prec or x.prec
        cs = self.intervals(prec)
        acc = cs[-1]
        for c in reversed(cs[:-1]):
            acc = acc * x + c
        return acc


_QCOEFF_CACHE: dict = {}

# Q(x) = (2/3) x (1-x) (2^{5/2} - 3 + 4(3 - 2^{3/2}) x) expanded in powers of x:
#   c0 = 0, c1 = -2 + (8/3) sqrt2, c2 = 10 - 8 sqrt2, c3 = -8 + (16/3) sqrt2
Q_COEFFS = QCoeffs(
    (
        (_F(0), _F(0)),
        (_F(-2), _F(8, 3)),
        (_F(10), _F(-8)),
        (_F(-8), _F(16, 3)),
    )
)
Q_D1_COEFFS = Q_COEFFS.derivative()
Q_D2_COEFFS = Q_D1_COEFFS.derivative()


def Q_value(x: Interval, prec: int | None = None) -> Interval:
    prec = prec or x.prec
    if x.lo < 0 or x.hi > 1:
        raise DomainError(f"Q argument {x} not within [0, 1]")
    if x.hi == 0 or x.lo == 1:  # exact roots
        return Interval.zero(prec)
    return Q_COEFFS.eval(x, prec)


def Q_d1(x: Interval, prec: int | None = None) -> Interval:
    return Q_D1_COEFFS.eval(x, prec or x.prec)


def Q_d2(x: Interval, prec: int | None = None) -> Interval:
    return Q_D2_COEFFS.eval(x, prec or x.prec)


# -- B and the two-point functionals ----------------------------------------


@dataclass(frozen=True)
class PiecewiseBellman:
    """B_w with its exact breakpoints 1/4 and 1/2."""

    params: BellmanParams
    breakpoints: tuple[Fraction, Fraction] = (_F(1, 4), _F(1, 2))

    def value(self, x: Interval, prec: int | None = None) -> Interval:
        return B_value(x, self.params, prec)


def _clip(x: Interval, lo: Fraction, hi: Fraction, prec: int) -> Interval | None:
    a = max(x.lo, Interval.point(lo, prec).lo)
    b = min(x.hi, Interval.point(hi, prec).hi)
    if a > b:
        return None
    return Interval._mk(a, b, prec)


def B_value(x: Interval, p: BellmanParams | None = None, prec: int | None = None) -> Interval:
    """Enclosure of B_w; straddling inputs take the hull of branch enclosures."""
    p = p or default_params()
    prec = prec or x.prec
    if x.lo < 0 or x.hi > 1:
        raise DomainError(f"B argument {x} not within [0, 1]")
    pieces = []
    seg = _clip(x, _F(0), _F(1, 4), prec)
    if seg is not None:
        pieces.append(L_value(seg, prec))
    seg = _clip(x, _F(1, 4), _F(1, 2), prec)
    if seg is not None:
        pieces.append(Q_value(seg, prec))
    seg = _clip(x, _F(1, 2), _F(1), prec)
    if seg is not None:
        pieces.append(j_value(seg, p, prec))
    return Interval.hull_of(pieces)


def G1_value(
    x: Interval, y: Interval, p: BellmanParams | None = None, prec: int | None = None
) -> Interval:
    p = p or default_params()
    prec = prec or max(x.prec, y.prec)
    d = y - x
    by = B_value(y, p, prec)
    mid = (x + y).half()
    return (d.square() + by.square()).sqrt() + B_value(x, p, prec) - B_value(mid, p, prec).double()


def G2_value(
    x: Interval, y: Interval, p: BellmanParams | None = None, prec: int | None = None
) -> Interval:
    p = p or default_params()
    prec = prec or max(x.prec, y.prec)
    mid = (x + y).half()
    return (
        (y - x)
        + (const_sqrt2(prec) - 1) * B_value(y, p, prec)
        + B_value(x, p, prec)
        - B_value(mid, p, prec).double()
    )


def G_value(
    x: Interval, y: Interval, p: BellmanParams | None = None, prec: int | None = None
) -> Interval:
    return G1_value(x, y, p, prec).max_with(G2_value(x, y, p, prec))


# -- lemma certifications ----------------------------------------------------


def certify_lemma_Q(max_depth: int = 20, prec: int = 64) -> Report:
    """Dyadic sign certification of Q' > 0 and Q'' < 0 on [0, 33/64]."""
    report = Report(name="lemma-Q", fingerprint={"precision": prec})
    region = ((_F(0), _F(33, 64)),)

    r1 = certify_sign(lambda ivs, pr: Q_d1(ivs[0], pr), region, positive=True,
                      max_depth=max_depth, ladder=(prec,))
    report.add(
        ReportItem(
            id="Q-deriv-positive-on-[0,33/64]",
            status="pass" if r1.status == "verified" else "fail",
            margin=min((float(l.bound_lo) for l in r1.leaves), default=None),
            depth=r1.max_depth_reached,
            detail=f"{len(r1.leaves)} leaves",
        )
    )
    r2 = certify_sign(lambda ivs, pr: Q_d2(ivs[0], pr), region, positive=False,
                      max_depth=max_depth, ladder=(prec,))
    report.add(
        ReportItem(
            id="Q-second-deriv-negative-on-[0,33/64]",
            status="pass" if r2.status == "verified" else "fail",
            margin=min((float(l.bound_lo) for l in r2.leaves), default=None),
            depth=r2.max_depth_reached,
            detail=f"{len(r2.leaves)} leaves",
        )
    )
    pt = Q_d1(Interval.point(_F(33, 64), prec))
    report.add(
        ReportItem(
            id="Q-deriv-positive-at-33/64",
            status="pass" if pt.certainly_gt(0) else "fail",
            margin=float(pt.lo),
        )
    )
    return report


def certify_lemma_L(max_depth: int = 24, prec: int = 64) -> Report:
    """Dyadic sign certification of L'' < 0 on [2^-30, 1/2].

    Below 2^-30 the leading singular term of L'' dominates and keeps the sign;
    that tail is documented as an assumption (no registered claim evaluates L
    there), so only the point at the cutoff is additionally checked.
    """
    report = Report(name="lemma-L", fingerprint={"precision": prec})
    region = ((_F(1, 2**30), _F(1, 2)),)
    r = certify_sign(lambda ivs, pr: L_d2(ivs[0], pr), region, positive=False,
                     max_depth=max_depth, ladder=(prec,))
    report.add(
        ReportItem(
            id="L-second-deriv-negative-on-[2^-30,1/2]",
            status="pass" if r.status == "verified" else "fail",
            margin=min((float(l.bound_lo) for l in r.leaves), default=None),
            depth=r.max_depth_reached,
            detail=f"{len(r.leaves)} leaves",
        )
    )
    pt = L_d2(Interval.point(_F(1, 4), prec))
    report.add(
        ReportItem(
            id="L-second-deriv-negative-at-1/4",
            status="pass" if pt.certainly_lt(0) else "fail",
            margin=float(-pt.hi),
        )
    )
    report.add(
        ReportItem(
            id="L-second-deriv-tail-(0,2^-30)",
            status="info",
            detail="sign below the cutoff carried by the dominant singular term; "
            "no registered claim evaluates L there",
        )
    )
    return report


def scan_B_above_L(
    p: BellmanParams | None = None, n_points: int = 4096, tol: float = 1e-12
) -> Report:
    """Non-rigorous dense scan of B_w(x) >= L(x) - tol on [0, 1/2].

    Supports the cited inequality B_w >= L used to pass from the two-point
    inequality to the main bound; this is an interior scan, not a proof.
    """
    p = p or default_params()
    report = Report(name="B-above-L-scan", fingerprint={"w": str(p.w), "points": n_points})
    worst = None
    ok = True
    for i in range(1, n_points):
        x = _F(i, 2 * n_points)  # grid over (0, 1/2)
        xi = Interval.point(x, 64)
        slack = float(B_value(xi, p).hi - L_value(xi).lo)
        if worst is None or slack < worst:
            worst = slack
        if slack < -tol:
            ok = False
    report.add(
        ReportItem(
            id="B-minus-L-grid-scan",
            status="scan" if ok else "fail",
            margin=worst,
            detail=f"{n_points} grid points on (0, 1/2), tolerance {tol}",
        )
    )
    return report
