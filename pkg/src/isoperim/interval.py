"""Directed-rounding interval arithmetic on MPFR endpoints.

Every operation rounds the lower endpoint toward -inf and the upper endpoint
toward +inf, so the exact mathematical image of the inputs is contained in the
result.  This containment property is the soundness foundation of every
certification in this package; it is property-tested in the test suite.

Endpoints are ``gmpy2.mpfr`` values.  MPFR guarantees correct rounding for all
the elementary functions used here (sqrt, exp, log, log2, erf/erfc), so
endpoint evaluation under a directed-rounding context yields rigorous
enclosures.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

import gmpy2

__all__ = [
    "Interval",
    "IntervalError",
    "DomainError",
    "RangeError",
    "CannotSplitError",
    "DEFAULT_PREC",
    "MIN_PREC",
    "validate_precision",
    "iv_arith",
    "iv_elementary",
    "iv_certify_gt",
    "iv_certify_lt",
    "iv_bisect",
    "const_sqrt2",
    "const_pi",
    "const_ln2",
    "const_sqrt_2pi",
    "const_inv_sqrt_2pi",
]

DEFAULT_PREC = 64
MIN_PREC = 24

ExactScalar = Union[int, Fraction, str]


class IntervalError(Exception):
    """Base class for interval arithmetic failures."""


class DomainError(IntervalError):
    """Operation applied outside its mathematical domain."""


class RangeError(IntervalError):
    """Evaluation requested outside the supported argument range."""


class CannotSplitError(IntervalError):
    """Bisection of a degenerate (zero width) interval."""


_CTX: dict = {}


def _ctx(prec: int, rnd):
    key = (prec, rnd)
    c = _CTX.get(key)
    if c is None:
        c = gmpy2.context(precision=prec, round=rnd)
        _CTX[key] = c
    return c


def _dn(prec: int):
    return _ctx(prec, gmpy2.RoundDown)


def _up(prec: int):
    return _ctx(prec, gmpy2.RoundUp)


def validate_precision(prec: int) -> int:
    if not isinstance(prec, int) or prec < MIN_PREC:
        raise ValueError(f"precision must be an integer >= {MIN_PREC}, got {prec!r}")
    return prec


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, gmpy2.mpq):
        return Fraction(int(v.numerator), int(v.denominator))
    raise TypeError(f"cannot interpret {v!r} as an exact rational")


def _fr_dn(fr: Fraction, prec: int):
    return _dn(prec).div(gmpy2.mpz(fr.numerator), gmpy2.mpz(fr.denominator))


def _fr_up(fr: Fraction, prec: int):
    return _up(prec).div(gmpy2.mpz(fr.numerator), gmpy2.mpz(fr.denominator))


class Interval:
    """Closed real interval [lo, hi] with outward-rounded endpoints."""

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi, prec: int = DEFAULT_PREC):
        validate_precision(prec)
        if not isinstance(lo, gmpy2.mpfr):
            lo = _fr_dn(_as_fraction(lo), prec)
        if not isinstance(hi, gmpy2.mpfr):
            hi = _fr_up(_as_fraction(hi), prec)
        if gmpy2.is_nan(lo) or gmpy2.is_nan(hi):
            raise IntervalError("NaN endpoint")
        if lo > hi:
            raise IntervalError(f"inverted endpoints: lo={lo} > hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, name, value):  # immutable after construction
        raise AttributeError("Interval is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def _mk(cls, lo, hi, prec: int) -> "Interval":
        obj = object.__new__(cls)
        object.__setattr__(obj, "lo", lo)
        object.__setattr__(obj, "hi", hi)
        object.__setattr__(obj, "prec", prec)
        if gmpy2.is_nan(lo) or gmpy2.is_nan(hi) or lo > hi:
            raise IntervalError(f"bad endpoints: [{lo}, {hi}]")
        return obj

    @classmethod
    def point(cls, v, prec: int = DEFAULT_PREC) -> "Interval":
        """Thinnest representable enclosure of an exact value.

        Decimal strings are parsed as exact rationals and outward-rounded,
        never double-rounded through binary floating point.
        """
        validate_precision(prec)
        if isinstance(v, gmpy2.mpfr):
            return cls._mk(_dn(prec).plus(v), _up(prec).plus(v), prec)
        fr = _as_fraction(v)
        return cls._mk(_fr_dn(fr, prec), _fr_up(fr, prec), prec)

    @classmethod
    def zero(cls, prec: int = DEFAULT_PREC) -> "Interval":
        z = gmpy2.mpfr(0, prec)
        return cls._mk(z, z, prec)

    @classmethod
    def hull_of(cls, items: Iterable["Interval"]) -> "Interval":
        items = list(items)
        if not items:
            raise ValueError("empty hull")
        prec = max(i.prec for i in items)
        return cls._mk(min(i.lo for i in items), max(i.hi for i in items), prec)

    # -- basic queries ------------------------------------------------------

    def width(self) -> float:
        return float(_up(self.prec).sub(self.hi, self.lo))

    def mid(self):
        """Exactly representable midpoint (computed at extended precision)."""
        p = max(self.lo.precision, self.hi.precision) + 2
        c = _ctx(p, gmpy2.RoundToNearest)
        return c.div_2exp(c.add(self.lo, self.hi), 1)

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, v) -> bool:
        if isinstance(v, Interval):
            return self.lo <= v.lo and v.hi <= self.hi
        if not isinstance(v, gmpy2.mpfr):
            v = gmpy2.mpq(_as_fraction(v))
        return self.lo <= v <= self.hi

    __contains__ = contains

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def certainly_gt(self, t) -> bool:
        """True only if every point of the interval exceeds ``t`` (rigorous)."""
        if not isinstance(t, gmpy2.mpfr):
            t = gmpy2.mpq(_as_fraction(t))
        return self.lo > t

    def certainly_lt(self, t) -> bool:
        if not isinstance(t, gmpy2.mpfr):
            t = gmpy2.mpq(_as_fraction(t))
        return self.hi < t

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Interval":
        if isinstance(other, Interval):
            return other
        return Interval.point(other, self.prec)

    def __add__(self, other) -> "Interval":
        b = self._coerce(other)
        prec = max(self.prec, b.prec)
        return Interval._mk(
            _dn(prec).add(self.lo, b.lo), _up(prec).add(self.hi, b.hi), prec
        )

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        prec = self.prec
        return Interval._mk(_dn(prec).minus(self.hi), _up(prec).minus(self.lo), prec)

    def __sub__(self, other) -> "Interval":
        b = self._coerce(other)
        prec = max(self.prec, b.prec)
        return Interval._mk(
            _dn(prec).sub(self.lo, b.hi), _up(prec).sub(self.hi, b.lo), prec
        )

    def __rsub__(self, other) -> "Interval":
        return self._coerce(other).__sub__(self)

    def __mul__(self, other) -> "Interval":
        b = self._coerce(other)
        prec = max(self.prec, b.prec)
        d, u = _dn(prec), _up(prec)
        pairs = (
            (self.lo, b.lo),
            (self.lo, b.hi),
            (self.hi, b.lo),
            (self.hi, b.hi),
        )
        lo = min(d.mul(x, y) for x, y in pairs)
        hi = max(u.mul(x, y) for x, y in pairs)
        return Interval._mk(lo, hi, prec)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        b = self._coerce(other)
        if b.contains_zero():
            raise DomainError(f"division by interval containing zero: {b}")
        prec = max(self.prec, b.prec)
        d, u = _dn(prec), _up(prec)
        pairs = (
            (self.lo, b.lo),
            (self.lo, b.hi),
            (self.hi, b.lo),
            (self.hi, b.hi),
        )
        lo = min(d.div(x, y) for x, y in pairs)
        hi = max(u.div(x, y) for x, y in pairs)
        return Interval._mk(lo, hi, prec)

    def __rtruediv__(self, other) -> "Interval":
        return self._coerce(other).__truediv__(self)

    def scale2(self, k: int) -> "Interval":
        """Multiply by 2**k (exact apart from precision rounding)."""
        prec = self.prec
        if k >= 0:
            return Interval._mk(
                _dn(prec).mul_2exp(self.lo, k), _up(prec).mul_2exp(self.hi, k), prec
            )
        return Interval._mk(
            _dn(prec).div_2exp(self.lo, -k), _up(prec).div_2exp(self.hi, -k), prec
        )

    def half(self) -> "Interval":
        return self.scale2(-1)

    def double(self) -> "Interval":
        return self.scale2(1)

    # -- elementary functions ----------------------------------------------

    def sqrt(self) -> "Interval":
        if self.lo < 0:
            raise DomainError(f"sqrt of interval with negative points: {self}")
        prec = self.prec
        return Interval._mk(_dn(prec).sqrt(self.lo), _up(prec).sqrt(self.hi), prec)

    def square(self) -> "Interval":
        prec = self.prec
        d, u = _dn(prec), _up(prec)
        if self.lo >= 0:
            return Interval._mk(d.square(self.lo), u.square(self.hi), prec)
        if self.hi <= 0:
            return Interval._mk(d.square(self.hi), u.square(self.lo), prec)
        return Interval._mk(
            gmpy2.mpfr(0, prec), max(u.square(self.lo), u.square(self.hi)), prec
        )

    def exp(self) -> "Interval":
        prec = self.prec
        return Interval._mk(_dn(prec).exp(self.lo), _up(prec).exp(self.hi), prec)

    def log(self) -> "Interval":
        if self.lo <= 0:
            raise DomainError(f"log of interval with non-positive points: {self}")
        prec = self.prec
        return Interval._mk(_dn(prec).log(self.lo), _up(prec).log(self.hi), prec)

    def log2(self) -> "Interval":
        if self.lo <= 0:
            raise DomainError(f"log2 of interval with non-positive points: {self}")
        prec = self.prec
        return Interval._mk(_dn(prec).log2(self.lo), _up(prec).log2(self.hi), prec)

    def abs(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        prec = self.prec
        return Interval._mk(gmpy2.mpfr(0, prec), max(-self.lo, self.hi), prec)

    # -- lattice operations -------------------------------------------------

    def hull(self, other: "Interval") -> "Interval":
        prec = max(self.prec, other.prec)
        return Interval._mk(min(self.lo, other.lo), max(self.hi, other.hi), prec)

    def intersect(self, other: "Interval") -> "Interval":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise IntervalError(f"empty intersection of {self} and {other}")
        return Interval._mk(lo, hi, max(self.prec, other.prec))

    def max_with(self, other: "Interval") -> "Interval":
        prec = max(self.prec, other.prec)
        return Interval._mk(max(self.lo, other.lo), max(self.hi, other.hi), prec)

    def clamp_lo(self, v) -> "Interval":
        """Raise the lower endpoint to ``v`` (caller guarantees validity)."""
        if not isinstance(v, gmpy2.mpfr):
            v = gmpy2.mpfr(_as_fraction(v).numerator, self.prec) if _as_fraction(
                v
            ).denominator == 1 else _fr_dn(_as_fraction(v), self.prec)
        lo = max(self.lo, v)
        return Interval._mk(lo, max(lo, self.hi), self.prec)

    # -- bisection ----------------------------------------------------------

    def bisect(self) -> tuple["Interval", "Interval"]:
        if self.lo >= self.hi:
            raise CannotSplitError(f"cannot bisect degenerate interval {self}")
        m = self.mid()
        if not (self.lo < m < self.hi):
            raise CannotSplitError(f"no representable midpoint in {self}")
        return (
            Interval._mk(self.lo, m, self.prec),
            Interval._mk(m, self.hi, self.prec),
        )

    # -- misc ---------------------------------------------------------------

    def to_floats(self) -> tuple[float, float]:
        return float(self.lo), float(self.hi)

    def __repr__(self) -> str:
        return f"[{self.lo}, {self.hi}]"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Interval)
            and self.lo == other.lo
            and self.hi == other.hi
        )

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))


# -- spec-level operation dispatch ------------------------------------------


def iv_arith(a: Interval, b: Interval, op: str) -> Interval:
    """Dispatch form of the four basic operations."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def iv_elementary(a: Interval, f: str) -> Interval:
    """Dispatch form of the elementary functions used by the proof."""
    if f == "sqrt":
        return a.sqrt()
    if f == "ln":
        return a.log()
    if f == "log2":
        return a.log2()
    if f == "exp":
        return a.exp()
    if f == "square":
        return a.square()
    raise ValueError(f"unknown function {f!r}")


def iv_certify_gt(a: Interval, t) -> bool:
    """Rigorous strict lower test: True only if every point of ``a`` exceeds ``t``.

    A False return is inconclusive, not a falsification.
    """
    return a.certainly_gt(t)


def iv_certify_lt(a: Interval, t) -> bool:
    return a.certainly_lt(t)


def iv_bisect(a: Interval) -> tuple[Interval, Interval]:
    return a.bisect()


# -- cached constants --------------------------------------------------------

_CONSTS: dict = {}


def _const(name: str, prec: int, builder) -> Interval:
    key = (name, prec)
    v = _CONSTS.get(key)
    if v is None:
        v = builder(prec)
        _CONSTS[key] = v
    return v


def const_sqrt2(prec: int = DEFAULT_PREC) -> Interval:
    return _const(
        "sqrt2",
        prec,
        lambda p: Interval._mk(_dn(p).sqrt(2), _up(p).sqrt(2), p),
    )


def const_pi(prec: int = DEFAULT_PREC) -> Interval:
    return _const(
        "pi",
        prec,
        lambda p: Interval._mk(_dn(p).const_pi(), _up(p).const_pi(), p),
    )


def const_ln2(prec: int = DEFAULT_PREC) -> Interval:
    return _const(
        "ln2",
        prec,
        lambda p: Interval._mk(_dn(p).const_log2(), _up(p).const_log2(), p),
    )


def const_sqrt_2pi(prec: int = DEFAULT_PREC) -> Interval:
    return _const("sqrt_2pi", prec, lambda p: const_pi(p).double().sqrt())


def const_inv_sqrt_2pi(prec: int = DEFAULT_PREC) -> Interval:
    return _const(
        "inv_sqrt_2pi", prec, lambda p: 1 / const_sqrt_2pi(p)
    )
