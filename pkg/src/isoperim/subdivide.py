"""Recursive dyadic subdivision with strict-positivity certification.

Boxes are products of intervals with exact dyadic rational endpoints,
represented as tuples of (lo, hi) Fractions.  A box is accepted when the
registered lower-bound function certifies the claim threshold; otherwise it is
bisected along its wider side (ties go to the first coordinate).  At maximum
depth the working precision escalates along the ladder before the box is
declared inconclusive.

The traversal is a deterministic depth-first walk emitting leaves in canonical
(sorted) order, so results are independent of any outer parallelism.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import gmpy2

from .interval import Interval

__all__ = ["Box", "Leaf", "SubdivisionResult", "dyadic_certify", "split_box", "box_to_intervals"]

Box = tuple[tuple[Fraction, Fraction], ...]
# bound(box, prec) -> Interval whose lower endpoint bounds the target from below
BoundEval = Callable[[Box, int], Interval]


@dataclass(frozen=True)
class Leaf:
    box: Box
    bound_lo: gmpy2.mpfr
    prec: int


@dataclass
class SubdivisionResult:
    status: str  # "verified" | "inconclusive"
    leaves: list[Leaf]
    max_depth_reached: int
    offending_box: Box | None = None
    offending_bound: float | None = None


def split_box(box: Box) -> tuple[Box, Box]:
    """Bisect along the wider side; ties go to the first coordinate."""
    widths = [hi - lo for lo, hi in box]
    axis = widths.index(max(widths))
    lo, hi = box[axis]
    mid = (lo + hi) / 2
    left = box[:axis] + ((lo, mid),) + box[axis + 1:]
    right = box[:axis] + ((mid, hi),) + box[axis + 1:]
    return left, right


def box_to_intervals(box: Box, prec: int) -> tuple[Interval, ...]:
    return tuple(
        Interval.point(lo, prec).hull(Interval.point(hi, prec)) for lo, hi in box
    )


def dyadic_certify(
    bound: BoundEval,
    region: Box,
    threshold: Fraction,
    max_depth: int = 60,
    ladder: Sequence[int] = (64, 128, 256, 512),
) -> SubdivisionResult:
    thr = gmpy2.mpq(threshold.numerator, threshold.denominator)
    base_prec = ladder[0]
    leaves: list[Leaf] = []
    max_depth_seen = 0

    # Explicit stack for a left-to-right depth-first walk.
    stack: list[tuple[Box, int]] = [(region, 0)]
    while stack:
        box, depth = stack.pop()
        max_depth_seen = max(max_depth_seen, depth)
        b = bound(box, base_prec)
        if b.lo > thr:
            leaves.append(Leaf(box=box, bound_lo=b.lo, prec=base_prec))
            continue
        if depth < max_depth:
            left, right = split_box(box)
            stack.append((right, depth + 1))
            stack.append((left, depth + 1))
            continue
        # Depth exhausted at base precision: escalate before giving up.
        certified = False
        for prec in ladder[1:]:
            b = bound(box, prec)
            if b.lo > thr:
                leaves.append(Leaf(box=box, bound_lo=b.lo, prec=prec))
                certified = True
                break
        if not certified:
            return SubdivisionResult(
                status="inconclusive",
                leaves=leaves,
                max_depth_reached=max_depth_seen,
                offending_box=box,
                offending_bound=float(b.lo),
            )
    return SubdivisionResult(
        status="verified", leaves=leaves, max_depth_reached=max_depth_seen
    )


def certify_sign(
    fn: Callable[[tuple[Interval, ...], int], Interval],
    region: Box,
    positive: bool = True,
    max_depth: int = 24,
    ladder: Sequence[int] = (64, 128),
) -> SubdivisionResult:
    """Certify a strict sign of ``fn`` over a box by dyadic partitioning.

    ``fn`` receives the full leaf box as intervals (generic interval
    evaluation, no endpoint selection), so soundness needs no monotonicity
    argument.
    """

    def bound(box: Box, prec: int) -> Interval:
        v = fn(box_to_intervals(box, prec), prec)
        return v if positive else -v

    return dyadic_certify(bound, region, Fraction(0), max_depth, ladder)
