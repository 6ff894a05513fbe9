"""Certified enclosures of the Gaussian isoperimetric profile and the
function J built from it.

The profile I is the unique function on [0,1] with I(0) = I(1) = 0 and
I * I'' = -1; concretely I = phi o Phi^{-1} with phi the standard normal
density and Phi the standard normal CDF.  Phi is enclosed through MPFR's
correctly rounded erfc; Phi^{-1} by rigorous bracketing refined with an
interval Newton iteration, re-checked against the forward enclosure.

J depends on a parameter w in (1/2, 1]:

    J_w(x) = (1/2) * I(1/(2w))^{-1} * I((1-x)/w)

with J_w(1/2) = 1/2, J_w(1) = 0 and the differential identity
J * J'' = -gamma, gamma = (4 w^2 I(1/(2w))^2)^{-1}.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from .interval import (
    DEFAULT_PREC,
    DomainError,
    Interval,
    RangeError,
    const_sqrt2,
    const_pi,
    _dn,
    _up,
)
from .report import Report, ReportItem

__all__ = [
    "EPS0",
    "BellmanParams",
    "EpsilonTerm",
    "norm_cdf",
    "norm_pdf",
    "norm_quantile",
    "profile_I",
    "j_value",
    "j_deriv",
    "j_deriv_abs",
    "j_second",
    "epsilon_term",
    "verify_j_lower_bound",
]

# Quantile support cutoff: below this only the trivial bound I >= 0 is served.
EPS0 = Fraction(1, 2**20)

_HALF = Fraction(1, 2)


def _key(v) -> gmpy2.mpq:
    if isinstance(v, gmpy2.mpfr):
        return gmpy2.mpq(v)
    if isinstance(v, Fraction):
        return gmpy2.mpq(v.numerator, v.denominator)
    if isinstance(v, int):
        return gmpy2.mpq(v)
    raise TypeError(f"expected exact scalar, got {v!r}")


def norm_cdf(t: Interval, prec: int | None = None) -> Interval:
    """Enclosure of the standard normal CDF over ``t``."""
    prec = prec or t.prec
    if prec != t.prec:
        t = Interval._mk(_dn(prec).plus(t.lo), _up(prec).plus(t.hi), prec)
    # Phi(x) = erfc(-x / sqrt 2) / 2; erfc is decreasing.
    z = (-t) / const_sqrt2(prec)
    lo = _dn(prec).div_2exp(_dn(prec).erfc(z.hi), 1)
    hi = _up(prec).div_2exp(_up(prec).erfc(z.lo), 1)
    lo = max(lo, gmpy2.mpfr(0, prec))
    hi = min(hi, gmpy2.mpfr(1, prec))
    return Interval._mk(lo, hi, prec)


def norm_pdf(t: Interval, prec: int | None = None) -> Interval:
    """Enclosure of the standard normal density over ``t``."""
    prec = prec or t.prec
    e = (-(t.square().half())).exp()
    return e / const_pi(prec).double().sqrt()


_QUANTILE_CACHE: dict = {}


def _quantile_point(v, prec: int) -> Interval:
    """Enclosure of Phi^{-1} at the exact value ``v``."""
    q = _key(v)
    cached = _QUANTILE_CACHE.get((q, prec))
    if cached is not None:
        return cached
    if not (gmpy2.mpq(EPS0.numerator, EPS0.denominator) <= q
            <= 1 - gmpy2.mpq(EPS0.numerator, EPS0.denominator)):
        raise RangeError(f"quantile argument {float(q)} outside supported range")

    xv = Interval.point(Fraction(int(q.numerator), int(q.denominator)), prec)
    guess = statistics.NormalDist().inv_cdf(min(max(float(q), 1e-12), 1 - 1e-12))

    # Establish a rigorous bracket around the non-rigorous seed.
    delta = 1e-8
    bracket = None
    for _ in range(40):
        lo = gmpy2.mpfr(guess - delta, prec)
        hi = gmpy2.mpfr(guess + delta, prec)
        phi_lo = norm_cdf(Interval._mk(lo, lo, prec))
        phi_hi = norm_cdf(Interval._mk(hi, hi, prec))
        if phi_lo.hi < q and phi_hi.lo > q:
            bracket = Interval._mk(lo, hi, prec)
            break
        delta *= 4
    if bracket is None:
        raise RangeError(f"failed to bracket quantile at {float(q)}")

    # Interval Newton: the root stays inside every iterate.
    t = bracket
    for _ in range(60):
        m = t.mid()
        m_iv = Interval._mk(m, m, prec)
        step = (norm_cdf(m_iv) - xv) / norm_pdf(t)
        t_new = t.intersect(m_iv - step)
        if t_new.width() >= t.width():
            break
        t = t_new
        if _up(prec).sub(t.hi, t.lo) <= gmpy2.mpfr(2, prec) ** (-prec + 2):
            break
    _QUANTILE_CACHE[(q, prec)] = t
    return t


def norm_quantile(x: Interval, prec: int | None = None) -> Interval:
    """Enclosure of Phi^{-1} over ``x``, for x within [2^-20, 1 - 2^-20]."""
    prec = prec or x.prec
    lo = _quantile_point(x.lo, prec)
    hi = lo if x.is_point() else _quantile_point(x.hi, prec)
    return Interval._mk(lo.lo, hi.hi, prec)


_I_CACHE: dict = {}

_EPS0_Q = gmpy2.mpq(EPS0.numerator, EPS0.denominator)


def _i_point(v, prec: int) -> Interval:
    """Enclosure of I at the exact value ``v`` in [eps0, 1 - eps0]."""
    q = _key(v)
    cached = _I_CACHE.get((q, prec))
    if cached is not None:
        return cached
    t = _quantile_point(v, prec)
    r = norm_pdf(t, prec)
    r = Interval._mk(max(r.lo, gmpy2.mpfr(0, prec)), r.hi, prec)
    _I_CACHE[(q, prec)] = r
    return r


def _i_point_lower(v, prec: int):
    """Rigorous lower endpoint for I at ``v``; clamps to 0 near the edges."""
    q = _key(v)
    if q <= _EPS0_Q or q >= 1 - _EPS0_Q:
        return gmpy2.mpfr(0, prec)
    return _i_point(v, prec).lo


def _i_point_upper(v, prec: int):
    q = _key(v)
    if q == 0 or q == 1:
        return gmpy2.mpfr(0, prec)
    if q < _EPS0_Q or q > 1 - _EPS0_Q:
        raise RangeError(
            f"upper enclosure of the profile is not served at {float(q)}"
        )
    return _i_point(v, prec).hi


def profile_I(x: Interval, prec: int | None = None) -> Interval:
    """Enclosure of the Gaussian isoperimetric profile over ``x`` in [0, 1].

    The lower endpoint is clamped to 0 when ``x`` extends below the quantile
    support cutoff (valid since I >= 0); an upper enclosure entirely below the
    cutoff is refused.
    """
    prec = prec or x.prec
    if x.lo < 0 or x.hi > 1:
        raise DomainError(f"profile argument {x} not within [0, 1]")
    if x.hi == 0 or x.lo == 1:  # degenerate at the roots
        return Interval.zero(prec)

    lo = min(_i_point_lower(x.lo, prec), _i_point_lower(x.hi, prec))

    half = gmpy2.mpq(1, 2)
    qlo, qhi = _key(x.lo), _key(x.hi)
    if qhi <= half:  # increasing piece
        hi = _i_point_upper(x.hi, prec)
    elif qlo >= half:  # decreasing piece
        hi = _i_point_upper(x.lo, prec)
    else:  # straddles the maximum I(1/2) = 1/sqrt(2 pi)
        hi = (1 / const_pi(prec).double().sqrt()).hi
    return Interval._mk(lo, max(lo, hi), prec)


@dataclass(frozen=True)
class BellmanParams:
    """The parameter w with its derived certified constants.

    ``x1 = 1 - w/2`` is the maximum of J; ``gamma`` the constant in
    J * J'' = -gamma.  Constants are enclosed once at construction precision
    and reused by every downstream enclosure.
    """

    w: Fraction
    prec: int
    x1: Fraction
    i_at_half_inv_w: Interval
    gamma: Interval
    _j_cache: dict = field(default_factory=dict, compare=False, repr=False)
    _jd_cache: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def create(cls, w: Fraction = Fraction(29, 32), prec: int = 128) -> "BellmanParams":
        w = Fraction(w)
        if not Fraction(1, 2) < w <= 1:
            raise DomainError(f"w must lie in (1/2, 1], got {w}")
        i0 = profile_I(Interval.point(1 / (2 * w), prec))
        if not i0.lo > 0:
            raise DomainError("profile enclosure at 1/(2w) must be positive")
        gamma = 1 / (Interval.point(2 * w, prec) * i0).square()
        return cls(w=w, prec=prec, x1=1 - w / 2, i_at_half_inv_w=i0, gamma=gamma)

    def x1_interval(self, prec: int | None = None) -> Interval:
        return Interval.point(self.x1, prec or self.prec)


DEFAULT_PARAMS: BellmanParams | None = None


def default_params() -> BellmanParams:
    global DEFAULT_PARAMS
    if DEFAULT_PARAMS is None:
        DEFAULT_PARAMS = BellmanParams.create()
    return DEFAULT_PARAMS


def _j_point(v, p: BellmanParams, prec: int) -> Interval:
    """Enclosure of J at the exact value ``v``."""
    q = _key(v)
    cached = p._j_cache.get((q, prec))
    if cached is not None:
        return cached
    w = gmpy2.mpq(p.w.numerator, p.w.denominator)
    if q == 1:
        return Interval.zero(prec)
    arg = (1 - q) / w
    if arg > 1 or arg < 0:
        raise DomainError(f"J argument {float(q)} outside [1 - w, 1]")
    arg_fr = Fraction(int(arg.numerator), int(arg.denominator))
    if arg < _EPS0_Q:
        # Very close to x = 1: J is decreasing there, so J at the reference
        # point 1 - w * eps0 (which is >= the current x) is a valid upper bound.
        ref = 1 - p.w * EPS0
        ub = _j_point(ref, p, prec).hi
        r = Interval._mk(gmpy2.mpfr(0, prec), ub, prec)
    else:
        i_arg = profile_I(Interval.point(arg_fr, prec))
        r = i_arg.half() / p.i_at_half_inv_w
        r = Interval._mk(max(r.lo, gmpy2.mpfr(0, prec)), r.hi, prec)
    p._j_cache[(q, prec)] = r
    return r


def _check_j_domain(x: Interval, p: BellmanParams) -> None:
    lo = _key(x.lo)
    if lo < 1 - gmpy2.mpq(p.w.numerator, p.w.denominator) or _key(x.hi) > 1:
        raise DomainError(f"J argument {x} outside [1 - w, 1]")


def j_value(x: Interval, p: BellmanParams, prec: int | None = None) -> Interval:
    """Tight enclosure of J over ``x`` using its monotone structure.

    J increases up to x1 = 1 - w/2 and decreases beyond, so the lower endpoint
    comes from the endpoint values and the upper endpoint from whichever of
    x.lo, x.hi, x1 dominates.
    """
    prec = prec or x.prec
    _check_j_domain(x, p)
    a = _j_point(x.lo, p, prec)
    b = a if x.is_point() else _j_point(x.hi, p, prec)
    lo = min(a.lo, b.lo)
    x1q = gmpy2.mpq(p.x1.numerator, p.x1.denominator)
    if _key(x.hi) < x1q:
        hi = b.hi
    elif _key(x.lo) > x1q:
        hi = a.hi
    else:
        hi = _j_point(p.x1, p, prec).hi
    return Interval._mk(lo, max(lo, hi), prec)


def _jd_point(v, p: BellmanParams, prec: int) -> Interval:
    """Enclosure of J' at the exact value ``v``.

    Closed form J'(x) = (1/(2w)) * I(1/(2w))^{-1} * Phi^{-1}((1-x)/w),
    which follows from I' = -Phi^{-1}.
    """
    q = _key(v)
    cached = p._jd_cache.get((q, prec))
    if cached is not None:
        return cached
    w = gmpy2.mpq(p.w.numerator, p.w.denominator)
    arg = (1 - q) / w
    if not (_EPS0_Q <= arg <= 1 - _EPS0_Q):
        raise RangeError(f"J' argument {float(q)} outside supported range")
    arg_fr = Fraction(int(arg.numerator), int(arg.denominator))
    qt = norm_quantile(Interval.point(arg_fr, prec))
    r = qt / (Interval.point(2 * p.w, prec) * p.i_at_half_inv_w)
    p._jd_cache[(q, prec)] = r
    return r


def j_deriv(x: Interval, p: BellmanParams, prec: int | None = None) -> Interval:
    """Enclosure of J' over ``x``; J' is strictly decreasing."""
    prec = prec or x.prec
    _check_j_domain(x, p)
    b = _jd_point(x.hi, p, prec)
    a = b if x.is_point() else _jd_point(x.lo, p, prec)
    return Interval._mk(min(a.lo, b.lo), max(a.hi, b.hi), prec)


def j_deriv_abs(x: Interval, p: BellmanParams, prec: int | None = None) -> Interval:
    """Enclosure of |J'| over ``x`` with the sign change at x1."""
    prec = prec or x.prec
    _check_j_domain(x, p)
    a = _jd_point(x.lo, p, prec)
    b = _jd_point(x.hi, p, prec)
    x1q = gmpy2.mpq(p.x1.numerator, p.x1.denominator)
    zero = gmpy2.mpfr(0, prec)
    if _key(x.hi) < x1q:
        lo = b.lo  # J' positive and decreasing: minimum modulus at x.hi
    elif _key(x.lo) > x1q:
        lo = (-a).lo  # J' negative: minimum modulus at x.lo
    else:
        lo = zero
    hi = max(a.abs().hi, b.abs().hi)
    return Interval._mk(max(lo, zero), hi, prec)


def j_second(x: Interval, p: BellmanParams, prec: int | None = None) -> Interval:
    """Enclosure of J'' = -gamma / J over ``x``."""
    prec = prec or x.prec
    return -(p.gamma / j_value(x, p, prec))


@dataclass(frozen=True)
class EpsilonTerm:
    """The correction term in the lower bound for J near 1."""

    x: Interval
    value: Interval


def epsilon_term(x: Interval, p: BellmanParams, prec: int | None = None) -> EpsilonTerm:
    """eps(x) = (1/2) log log(w/x) / log(w/x) + log(2 sqrt pi) / log(w/x)."""
    prec = prec or x.prec
    u = (Interval.point(p.w, prec) / x).log()
    c = (const_pi(prec).sqrt().double()).log()
    value = (u.log() / u).half() + c / u
    return EpsilonTerm(x=x, value=value)


def verify_j_lower_bound(
    p: BellmanParams | None = None,
    prec: int = 128,
    grid_depth: int = 8,
) -> Report:
    """Certify the lower bound J(1-x) > x sqrt(log(w/x)) on (0, 1/64].

    The bound reduces to the constant inequality
    (sqrt2 / (2w)) * I(1/(2w))^{-1} * (1 - eps(1/64)) >= 1 together with the
    monotonicity of eps.  eps is increasing wherever u = log(w/x) >= e, which
    is certified leafwise on a dyadic partition of [2^-40, 1/64]; for
    x < 2^-40 the quantity u only grows (u is decreasing in x), which is
    checked at the tail endpoint.
    """
    p = p or default_params()
    report = Report(
        name="j-lower-bound", fingerprint={"w": str(p.w), "precision": prec}
    )

    one_64 = Fraction(1, 64)
    eps = epsilon_term(Interval.point(one_64, prec), p, prec).value
    const = (
        const_sqrt2(prec)
        / (Interval.point(2 * p.w, prec) * p.i_at_half_inv_w)
        * (1 - eps)
    )
    report.add(
        ReportItem(
            id="constant-at-least-one",
            status="pass" if const.lo >= 1 else "fail",
            margin=float(const.lo - 1),
            detail=f"constant enclosure {const}",
            precision=prec,
        )
    )
    report.add(
        ReportItem(
            id="epsilon-below-one-at-1/64",
            status="pass" if eps.hi < 1 else "fail",
            margin=float(1 - eps.hi),
            detail=f"eps(1/64) enclosure {eps}",
            precision=prec,
        )
    )

    # eps increasing on [2^-40, 1/64]: certify log(log(w/x)) > 1 on each leaf.
    lo, hi = Fraction(1, 2**40), one_64
    n_leaves = 2**grid_depth
    all_ok = True
    worst = None
    for i in range(n_leaves):
        a = lo + (hi - lo) * i / n_leaves
        b = lo + (hi - lo) * (i + 1) / n_leaves
        leaf = Interval.point(a, prec).hull(Interval.point(b, prec))
        u = (Interval.point(p.w, prec) / leaf).log()
        m = u.log() - 1
        if not m.certainly_gt(0):
            all_ok = False
        if worst is None or m.lo < worst:
            worst = m.lo
    report.add(
        ReportItem(
            id="epsilon-increasing-grid",
            status="pass" if all_ok else "fail",
            margin=float(worst),
            detail=f"log log(w/x) - 1 > 0 on {n_leaves} dyadic leaves of [2^-40, 1/64]",
            precision=prec,
        )
    )

    tail = (Interval.point(p.w, prec) / Interval.point(Fraction(1, 2**40), prec)).log()
    tail_m = tail.log() - 1
    report.add(
        ReportItem(
            id="epsilon-increasing-tail",
            status="pass" if tail_m.certainly_gt(0) else "fail",
            margin=float(tail_m.lo),
            detail="tail endpoint check at x = 2^-40; u = log(w/x) only grows as x -> 0",
            precision=prec,
        )
    )
    return report
