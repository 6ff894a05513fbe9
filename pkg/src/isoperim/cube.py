"""Exact discrete verification on small Hamming cubes.

Subsets of {0,1}^n are bitmasks over the 2^n vertices, so exhaustive
enumeration at n <= 4 is a loop over 16-bit integers.  Edge-boundary counts
are exact integers; expectations of sqrt(h) are evaluated as rigorous
interval sums of integer square roots, and compared against interval
enclosures of the continuous bounds, so a reported violation can never be a
rounding artifact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .interval import Interval, _dn, _up
from .gaussian import BellmanParams, default_params
from .bellman import B_value, L_value
from .report import Report, ReportItem

__all__ = [
    "CubeSet",
    "BoundaryProfile",
    "boundary_profile",
    "subcube_masks",
    "check_main_theorem",
    "check_sharpening",
    "check_kahn_park",
    "check_poincare",
    "hamming_ball_profile",
    "noise_operator",
    "hellinger_lownoise_check",
    "check_sensitivity_lower",
    "EXHAUSTIVE_SUBSET_LIMIT",
]

_F = Fraction
EXHAUSTIVE_SUBSET_LIMIT = 4  # 2^(2^n) subsets beyond this is out of desk range
_EQ_TOL = 1e-12


@dataclass(frozen=True)
class CubeSet:
    """A subset of {0,1}^n as a bitmask over vertex indices."""

    n: int
    mask: int

    def __post_init__(self) -> None:
        if not 1 <= self.n <= 26:
            raise ValueError("dimension out of supported range")
        if not 0 <= self.mask < 1 << (1 << self.n):
            raise ValueError("membership mask out of range")

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    @property
    def measure(self) -> Fraction:
        return _F(self.size, 1 << self.n)

    def complement(self) -> "CubeSet":
        full = (1 << (1 << self.n)) - 1
        return CubeSet(self.n, self.mask ^ full)

    def __contains__(self, x: int) -> bool:
        return bool(self.mask >> x & 1)


@dataclass(frozen=True)
class BoundaryProfile:
    n: int
    h: tuple[int, ...]
    s: tuple[int, ...]
    dA_size: Fraction
    edge_cut: Fraction


def _neighbor_masks(n: int) -> list[int]:
    size = 1 << n
    out = []
    for x in range(size):
        m = 0
        for i in range(n):
            m |= 1 << (x ^ (1 << i))
        out.append(m)
    return out


def boundary_profile(A: CubeSet) -> BoundaryProfile:
    n, mask = A.n, A.mask
    size = 1 << n
    full = (1 << size) - 1
    comp = mask ^ full
    nb = _neighbor_masks(n)
    h = [0] * size
    s = [0] * size
    cut_edges = 0
    for x in range(size):
        out_deg = (nb[x] & comp).bit_count()
        in_deg = (nb[x] & mask).bit_count()
        if mask >> x & 1:
            h[x] = out_deg
            cut_edges += out_deg
            s[x] = out_deg
        else:
            s[x] = in_deg
    boundary = sum(1 for x in range(size) if h[x] > 0)
    return BoundaryProfile(
        n=n,
        h=tuple(h),
        s=tuple(s),
        dA_size=_F(boundary, size),
        edge_cut=_F(cut_edges, size),
    )


def subcube_masks(n: int) -> dict[int, int]:
    """All subcubes as mask -> codimension (the full cube has codimension 0)."""
    size = 1 << n
    out: dict[int, int] = {(1 << size) - 1: 0}
    for k in range(1, n + 1):
        for coords in combinations(range(n), k):
            for values in product((0, 1), repeat=k):
                m = 0
                for x in range(size):
                    if all((x >> c & 1) == v for c, v in zip(coords, values)):
                        m |= 1 << x
                out[m] = k
    return out


# -- rigorous E sqrt(h) ------------------------------------------------------


def _sqrt_table(n: int, prec: int) -> list[Interval]:
    return [Interval.point(k, prec).sqrt() for k in range(n + 1)]


def _esqrt_from_counts(counts: tuple[int, ...], size: int, roots: list[Interval], prec: int) -> Interval:
    d, u = _dn(prec), _up(prec)
    lo = hi = None
    import gmpy2

    lo = gmpy2.mpfr(0, prec)
    hi = gmpy2.mpfr(0, prec)
    for k, c in enumerate(counts):
        if c == 0 or k == 0:
            continue
        lo = d.add(lo, d.mul(gmpy2.mpfr(c, prec), roots[k].lo))
        hi = u.add(hi, u.mul(gmpy2.mpfr(c, prec), roots[k].hi))
    inv = Interval.point(_F(1, size), prec)
    return Interval._mk(lo, hi, prec) * inv


def _hist(mask: int, nb: list[int], comp: int, n: int) -> tuple[int, ...]:
    counts = [0] * (n + 1)
    m = mask
    while m:
        x = (m & -m).bit_length() - 1
        m &= m - 1
        counts[(nb[x] & comp).bit_count()] += 1
    return tuple(counts)


def _enumerate_masks(n: int, sample: int | None, seed: int) -> list[int]:
    size = 1 << n
    if sample is None:
        return list(range(1 << size))
    rng = random.Random(seed)
    masks = set(subcube_masks(n))
    masks.update({0, (1 << size) - 1})
    while len(masks) < sample:
        masks.add(rng.getrandbits(size))
    return sorted(masks)


def check_main_theorem(
    n: int,
    params: BellmanParams | None = None,
    prec: int = 64,
    sample: int | None = None,
    seed: int = 0,
) -> Report:
    """E sqrt(h_A) >= L(|A|) for |A| <= 1/2, and >= B(|A|) for all A.

    Exhaustive over all subsets for n <= 4; sampled (always including all
    subcubes) for larger n.  Equality cases are matched exactly against the
    predicted family: the empty set and all proper subcubes, plus the full
    cube for the piecewise bound.
    """
    p = params or default_params()
    report = Report(name="cube-main", fingerprint={"n": n, "w": str(p.w), "sample": sample})
    if n > EXHAUSTIVE_SUBSET_LIMIT and sample is None:
        raise ValueError(f"exhaustive enumeration not supported for n={n}; pass sample")
    size = 1 << n
    full = (1 << size) - 1
    nb = _neighbor_masks(n)
    roots = _sqrt_table(n, prec)

    l_hi = {}
    b_hi = {}
    for k in range(size + 1):
        mi = Interval.point(_F(k, size), prec)
        b_hi[k] = B_value(mi, p, prec)
        if 2 * k <= size:
            l_hi[k] = L_value(mi, prec)

    ecache: dict[tuple[int, ...], Interval] = {}
    min_slack_L = min_slack_B = None
    eq_L: set[int] = set()
    eq_B: set[int] = set()
    viol = []
    masks = _enumerate_masks(n, sample, seed)
    for mask in masks:
        counts = _hist(mask, nb, mask ^ full, n)
        e = ecache.get(counts)
        if e is None:
            e = _esqrt_from_counts(counts, size, roots, prec)
            ecache[counts] = e
        k = mask.bit_count()
        targets = [("B", b_hi[k], eq_B)]
        if 2 * k <= size:
            targets.append(("L", l_hi[k], eq_L))
        for name, rhs, eq in targets:
            d = e - rhs
            slack = float(d.lo)
            if name == "L":
                min_slack_L = slack if min_slack_L is None else min(min_slack_L, slack)
            else:
                min_slack_B = slack if min_slack_B is None else min(min_slack_B, slack)
            if float(d.hi) < -_EQ_TOL:
                viol.append((name, mask))
            elif abs(float(d.lo)) < _EQ_TOL and abs(float(d.hi)) < _EQ_TOL:
                eq.add(mask)

    subcubes = subcube_masks(n)
    proper = {m for m, k in subcubes.items() if k >= 1}
    expected_L = proper | {0}
    expected_B = proper | {0, full}
    if sample is not None:
        # Sampled masks may miss none of these: subcubes are always included.
        pass

    report.add(
        ReportItem(
            id="no-violations",
            status="fail" if viol else "pass",
            margin=min(x for x in (min_slack_L, min_slack_B) if x is not None),
            detail=f"{len(masks)} subsets checked"
            + (f"; first violation {viol[0]}" if viol else ""),
        )
    )
    report.add(
        ReportItem(
            id="equality-exactly-on-subcubes-L",
            status="pass" if eq_L == expected_L else "fail",
            detail=f"{len(eq_L)} equality sets, expected {len(expected_L)} "
            "(empty set and all proper subcubes)",
        )
    )
    report.add(
        ReportItem(
            id="equality-exactly-on-subcubes-B",
            status="pass" if eq_B == expected_B else "fail",
            detail=f"{len(eq_B)} equality sets, expected {len(expected_B)} "
            "(adds the full cube)",
        )
    )
    return report


def check_sharpening(n: int, prec: int = 64) -> Report:
    """E h_A >= (|A| / |boundary A|) |A| log2(1/|A|) for 0 < |A| <= 1/2."""
    report = Report(name="cube-sharpening", fingerprint={"n": n})
    if n > EXHAUSTIVE_SUBSET_LIMIT:
        raise ValueError(f"exhaustive enumeration not supported for n={n}")
    size = 1 << n
    full = (1 << size) - 1
    nb = _neighbor_masks(n)
    log2_cache = {
        k: -(Interval.point(_F(k, size), prec).log2()) for k in range(1, size // 2 + 1)
    }
    min_slack = None
    eq = set()
    viol = []
    checked = 0
    for mask in range(1, 1 << size):
        k = mask.bit_count()
        if 2 * k > size:
            continue
        checked += 1
        comp = mask ^ full
        eh = 0
        boundary = 0
        m = mask
        while m:
            x = (m & -m).bit_length() - 1
            m &= m - 1
            deg = (nb[x] & comp).bit_count()
            eh += deg
            if deg:
                boundary += 1
        lhs = Interval.point(_F(eh, size), prec)
        measure = _F(k, size)
        rhs = Interval.point(measure * measure / _F(boundary, size), prec) * log2_cache[k]
        d = lhs - rhs
        slack = float(d.lo)
        min_slack = slack if min_slack is None else min(min_slack, slack)
        if float(d.hi) < -_EQ_TOL:
            viol.append(mask)
        elif abs(float(d.lo)) < _EQ_TOL and abs(float(d.hi)) < _EQ_TOL:
            eq.add(mask)

    proper = {m for m, c in subcube_masks(n).items() if c >= 1}
    report.add(
        ReportItem(
            id="no-violations",
            status="fail" if viol else "pass",
            margin=min_slack,
            detail=f"{checked} subsets with 0 < measure <= 1/2",
        )
    )
    report.add(
        ReportItem(
            id="equality-includes-subcubes",
            status="pass" if proper <= eq else "fail",
            detail=f"{len(eq)} equality sets contain all {len(proper)} proper subcubes",
        )
    )
    return report


def check_kahn_park(n: int, prec: int = 64) -> Report:
    """edge_cut(A, B) + sqrt(n) |W| >= 1/2 over partitions with |A| = 1/2."""
    report = Report(name="cube-partition", fingerprint={"n": n})
    if n > 3:
        raise ValueError("exhaustive partition enumeration supported for n <= 3")
    size = 1 << n
    half = size // 2
    nb = _neighbor_masks(n)
    sqrt_n = Interval.point(n, prec).sqrt()
    min_slack = None
    count = 0
    viol = []
    for a_bits in combinations(range(size), half):
        a_mask = 0
        for x in a_bits:
            a_mask |= 1 << x
        rest = [x for x in range(size) if not a_mask >> x & 1]
        for assign in product((0, 1), repeat=len(rest)):  # 0 -> B, 1 -> W
            b_mask = 0
            w = 0
            for x, c in zip(rest, assign):
                if c:
                    w += 1
                else:
                    b_mask |= 1 << x
            cut = 0
            m = a_mask
            while m:
                x = (m & -m).bit_length() - 1
                m &= m - 1
                cut += (nb[x] & b_mask).bit_count()
            lhs = Interval.point(_F(cut, size), prec) + sqrt_n * Interval.point(_F(w, size), prec)
            d = lhs - Interval.point(_F(1, 2), prec)
            slack = float(d.lo)
            min_slack = slack if min_slack is None else min(min_slack, slack)
            if float(d.hi) < -_EQ_TOL:
                viol.append((a_mask, b_mask))
            count += 1
    report.add(
        ReportItem(
            id="no-violations",
            status="fail" if viol else "pass",
            margin=min_slack,
            detail=f"{count} partitions with |A| = 1/2",
        )
    )
    return report


def check_poincare(n: int, prec: int = 64) -> Report:
    """The L1 gradient bound over all Boolean functions on {0,1}^n.

    The gradient norm collapses to (1/2) E sqrt(s_f); the right-hand side is
    2 |A| (1 - |A|).  Also cross-checks the complement-splitting identity
    for the gradient norm on every function.
    """
    report = Report(name="cube-poincare", fingerprint={"n": n})
    if n > EXHAUSTIVE_SUBSET_LIMIT:
        raise ValueError(f"exhaustive enumeration not supported for n={n}")
    size = 1 << n
    full = (1 << size) - 1
    nb = _neighbor_masks(n)
    roots = _sqrt_table(n, prec)
    half_cubes = {m for m, c in subcube_masks(n).items() if c == 1}

    min_slack = None
    eq = set()
    viol = []
    identity_ok = True
    for mask in range(1 << size):
        comp = mask ^ full
        s_counts = [0] * (n + 1)
        a_counts = [0] * (n + 1)
        c_counts = [0] * (n + 1)
        for x in range(size):
            if mask >> x & 1:
                d = (nb[x] & comp).bit_count()
                a_counts[d] += 1
                s_counts[d] += 1
            else:
                d = (nb[x] & mask).bit_count()
                c_counts[d] += 1
                s_counts[d] += 1
        es = _esqrt_from_counts(tuple(s_counts), size, roots, prec)
        grad = es.half()
        ea = _esqrt_from_counts(tuple(a_counts), size, roots, prec)
        ec = _esqrt_from_counts(tuple(c_counts), size, roots, prec)
        ident = grad - (ea + ec).half()
        if not ident.contains(0):
            identity_ok = False
        k = mask.bit_count()
        rhs = Interval.point(2 * _F(k, size) * (1 - _F(k, size)), prec)
        d = grad - rhs
        slack = float(d.lo)
        min_slack = slack if min_slack is None else min(min_slack, slack)
        if float(d.hi) < -_EQ_TOL:
            viol.append(mask)
        elif abs(float(d.lo)) < _EQ_TOL and abs(float(d.hi)) < _EQ_TOL:
            eq.add(mask)

    expected_eq = half_cubes | {0, full}
    report.add(
        ReportItem(
            id="no-violations",
            status="fail" if viol else "pass",
            margin=min_slack,
            detail=f"{1 << size} Boolean functions",
        )
    )
    report.add(
        ReportItem(
            id="equality-exactly-on-half-cubes-and-constants",
            status="pass" if eq == expected_eq else "fail",
            detail=f"{len(eq)} equality functions, expected {len(expected_eq)}",
        )
    )
    report.add(
        ReportItem(
            id="gradient-complement-splitting-identity",
            status="pass" if identity_ok else "fail",
            detail="E sqrt(s) = E sqrt(h_A) + E sqrt(h_complement) on every function",
        )
    )
    return report


# -- Hamming balls and the noise operator ------------------------------------


def hamming_ball_profile(n: int, r: int, beta: Fraction, prec: int = 64) -> dict:
    """Measure and boundary moment of the ball {x : |x| <= r}.

    Only the top layer |x| = r has out-edges, each vertex there having
    exactly n - r of them, so the moment has a closed form.
    """
    if not 0 <= r <= n:
        raise ValueError("radius out of range")
    measure = _F(sum(_comb(n, k) for k in range(r + 1)), 1 << n)
    coeff = Interval.point(_F(_comb(n, r), 1 << n), prec)
    if n == r:
        moment = Interval.zero(prec) if beta > 0 else coeff
    else:
        base = Interval.point(n - r, prec)
        b = Interval.point(beta, prec)
        moment = coeff * (b * base.log()).exp()
    return {"n": n, "r": r, "beta": beta, "measure": measure, "moment": moment}


def _comb(n: int, k: int) -> int:
    import math

    return math.comb(n, k)


def noise_operator(table: list[Fraction | int], rho: Fraction) -> list[Fraction]:
    """Exact averaging over independent bit flips with probability (1-rho)/2.

    One tensor pass per coordinate; the result equals the full 2^n-term
    expectation E_Z f(x xor Z).
    """
    size = len(table)
    n = size.bit_length() - 1
    if 1 << n != size:
        raise ValueError("table length must be a power of two")
    if not -1 <= rho <= 1:
        raise ValueError("correlation out of [-1, 1]")
    p = (1 - _F(rho)) / 2
    q = 1 - p
    out = [_F(v) for v in table]
    for i in range(n):
        step = 1 << i
        for base in range(0, size, step << 1):
            for j in range(base, base + step):
                a, b = out[j], out[j + step]
                out[j] = q * a + p * b
                out[j + step] = q * b + p * a
    return out


def _esqrt_sensitivity(mask: int, n: int, prec: int = 64) -> Interval:
    size = 1 << n
    full = (1 << size) - 1
    nb = _neighbor_masks(n)
    counts = [0] * (n + 1)
    for x in range(size):
        other = (mask ^ full) if (mask >> x & 1) else mask
        counts[(nb[x] & other).bit_count()] += 1
    return _esqrt_from_counts(tuple(counts), size, _sqrt_table(n, prec), prec)


def hellinger_lownoise_check(
    mask: int,
    n: int,
    p_list: list[Fraction],
    require_balanced: bool = True,
    prec: int = 64,
) -> Report:
    """Low-noise Hellinger ratio convergence to E sqrt(s_f).

    For each flip probability p, computes E sqrt(1 - (T_rho f)^2) divided by
    sqrt(1 - rho^2) exactly-then-enclosed, and checks that the deviation from
    E sqrt(s_f) shrinks by at least 5x per 100x decrease of p.
    """
    report = Report(name="hellinger-lownoise", fingerprint={"n": n, "mask": hex(mask)})
    size = 1 << n
    table = [1 if mask >> x & 1 else -1 for x in range(size)]
    mean = _F(sum(table), size)
    if require_balanced and mean != 0:
        report.add(ReportItem(id="balanced", status="fail", detail=f"mean {mean} != 0"))
        return report

    es = _esqrt_sensitivity(mask, n, prec)
    es_mid = float(es.mid())
    deviations = []
    for p in sorted(p_list, reverse=True):
        rho = 1 - 2 * _F(p)
        tf = noise_operator(table, rho)
        acc = Interval.zero(prec)
        for v in tf:
            acc = acc + (1 - Interval.point(v, prec).square()).clamp_lo(0).sqrt()
        denom = (1 - Interval.point(rho, prec).square()).sqrt()
        ratio = acc * Interval.point(_F(1, size), prec) / denom
        dev = abs(float(ratio.mid()) - es_mid)
        deviations.append((p, dev))
        report.add(
            ReportItem(
                id=f"ratio-at-p={float(p):g}",
                status="info",
                margin=dev,
                detail=f"ratio {float(ratio.mid()):.9f}, target {es_mid:.9f}",
            )
        )
    ok = True
    for (p1, d1), (p2, d2) in zip(deviations, deviations[1:]):
        if _F(p1) / _F(p2) >= 100 and d1 > 0 and not d2 <= d1 / 5:
            ok = False
    report.add(
        ReportItem(
            id="deviation-shrinks-5x-per-100x",
            status="pass" if ok else "fail",
            detail=f"deviations {[(float(p), d) for p, d in deviations]}",
        )
    )
    return report


def check_sensitivity_lower(n: int, prec: int = 64) -> Report:
    """E sqrt(s_f) >= 1 for every balanced f, exhaustively."""
    report = Report(name="sensitivity-lower", fingerprint={"n": n})
    if n > EXHAUSTIVE_SUBSET_LIMIT:
        raise ValueError(f"exhaustive enumeration not supported for n={n}")
    size = 1 << n
    full = (1 << size) - 1
    nb = _neighbor_masks(n)
    roots = _sqrt_table(n, prec)
    min_slack = None
    viol = []
    count = 0
    for mask in range(1 << size):
        if 2 * mask.bit_count() != size:
            continue
        count += 1
        counts = [0] * (n + 1)
        for x in range(size):
            other = (mask ^ full) if (mask >> x & 1) else mask
            counts[(nb[x] & other).bit_count()] += 1
        es = _esqrt_from_counts(tuple(counts), size, roots, prec)
        slack = float(es.lo) - 1.0
        min_slack = slack if min_slack is None else min(min_slack, slack)
        if float(es.hi) < 1.0 - _EQ_TOL:
            viol.append(mask)
    report.add(
        ReportItem(
            id="no-violations",
            status="fail" if viol else "pass",
            margin=min_slack,
            detail=f"{count} balanced functions",
        )
    )
    return report
