"""End-to-end acceptance gate: eight criteria, one pass/fail line each."""

import random
import time
from fractions import Fraction

import gmpy2
import mpmath as mp
import pytest

from isoperim import partition as pt
from isoperim.analytic import (
    verify_case_J,
    verify_case_LJ_II,
    verify_case_LJQ_boundary,
    verify_case_P_I,
    verify_case_QJQ_support,
)
from isoperim.bellman import L_value, Q_value
from isoperim.cube import (
    check_kahn_park,
    check_main_theorem,
    check_poincare,
    check_sensitivity_lower,
    check_sharpening,
    hamming_ball_profile,
    hellinger_lownoise_check,
)
from isoperim.gaussian import j_value
from isoperim.interval import Interval, iv_arith

F = Fraction
PER_CLAIM_BUDGET = 300.0  # seconds
CUBE_BUDGET = 600.0


def _line(num: int, ok: bool, desc: str) -> None:
    print(f"criterion-{num}: {'PASS' if ok else 'FAIL'} - {desc}")
    assert ok, f"criterion-{num}: {desc}"


@pytest.fixture(scope="module")
def all_certs(params):
    t0 = time.monotonic()
    report, certs = pt.verify_all(params, jobs=1, include_analytic=False)
    return report, certs, time.monotonic() - t0


def test_criterion_1_all_claims_certified(all_certs):
    report, certs, _elapsed = all_certs
    ok = report.passed and len(certs) == 9
    ok = ok and all(c.status == "verified" for c in certs.values())
    slow = [i.id for i in report.items if (i.seconds or 0) > PER_CLAIM_BUDGET]
    ok = ok and not slow
    total_leaves = sum(len(c.leaves) for c in certs.values())
    _line(1, ok, f"all nine dyadic claims certified ({total_leaves} leaves, "
                 f"each claim within {PER_CLAIM_BUDGET:.0f}s)")


def test_criterion_2_analytic_constants(params):
    ok = True
    g = params.gamma
    ok &= float(g.lo) > 1.945 and float(g.hi) < 1.946
    ok &= g.width() <= 1e-3
    for case in (verify_case_J, verify_case_LJQ_boundary, verify_case_LJ_II,
                 verify_case_QJQ_support, verify_case_P_I):
        ok &= case(params).passed
    _line(2, bool(ok), "curvature constant enclosed in [1.945, 1.946] and all "
                       "analytic point-check suites pass at stated margins")


def test_criterion_3_exhaustive_small_cubes(params):
    t0 = time.monotonic()
    ok = check_main_theorem(4, params).passed
    for n in (1, 2, 3, 4):
        ok &= check_sharpening(n).passed
    ok &= check_poincare(4).passed
    ok &= check_kahn_park(3).passed
    elapsed = time.monotonic() - t0
    ok &= elapsed < CUBE_BUDGET
    _line(3, bool(ok), f"exhaustive n<=4 cube checks with exact equality-case "
                       f"matching in {elapsed:.1f}s")


def test_criterion_4_certificate_integrity(all_certs, params):
    import dataclasses

    _report, certs, _elapsed = all_certs
    ok = True
    for cert in certs.values():
        back = pt.Certificate.from_text(cert.to_text())
        ok &= back.to_text() == cert.to_text()
        ok &= pt.check_certificate(back, params)
    # single tampered leaf must be caught
    victim = certs["QJ2"]
    leaf = victim.leaves[len(victim.leaves) // 2]
    forged = pt.Leaf(box=leaf.box, bound_lo=gmpy2.mpfr("1.0", leaf.prec), prec=leaf.prec)
    idx = victim.leaves.index(leaf)
    bad = dataclasses.replace(
        victim, leaves=victim.leaves[:idx] + [forged] + victim.leaves[idx + 1:]
    )
    ok &= not pt.check_certificate(bad, params)
    _line(4, bool(ok), "certificates round-trip byte-exactly, re-verify "
                       "independently, and a single tampered leaf is rejected")


def test_criterion_5_parallel_determinism(all_certs, params):
    _report, serial, _elapsed = all_certs
    report8, par = pt.verify_all(params, jobs=8, include_analytic=False)
    ok = report8.passed
    for cid in pt.claim_ids():
        ok &= serial[cid].to_text() == par[cid].to_text()
    _line(5, bool(ok), "jobs=1 and jobs=8 produce byte-identical certificates")


def _containment_battery() -> bool:
    rng = random.Random(20260823)
    ops = ("add", "sub", "mul", "div")
    for op in ops:
        for _ in range(1000):
            a = F(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))
            b = F(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))
            c = F(rng.randint(1, 10**6), rng.randint(1, 10**6))
            d = F(rng.randint(1, 10**6), rng.randint(1, 10**6))
            x = Interval.point(min(a, b), 64).hull(Interval.point(max(a, b), 64))
            y = Interval.point(min(c, d), 64).hull(Interval.point(max(c, d), 64))
            exact = {"add": a + c, "sub": a - d, "mul": b * c, "div": a / c}[op]
            if not iv_arith(x, y, op).contains(exact):
                return False
    return True


def _ode_battery(params) -> bool:
    h = F(1, 2**18)
    h2 = Interval.point(h * h, 192)
    gamma = float(params.gamma.mid())
    for k in range(1, 51):
        x = F(1, 2) + F(k, 51) * F(15, 32)
        jp = j_value(Interval.point(x + h, 192), params, 192)
        jm = j_value(Interval.point(x - h, 192), params, 192)
        j0 = j_value(Interval.point(x, 192), params, 192)
        second = (jp + jm - j0.double()) / h2
        prod = float((j0 * second).mid())
        if abs(prod + gamma) > 1e-5 * gamma:
            return False
    return True


def _continuity_battery(params) -> bool:
    l14 = L_value(Interval.point(F(1, 4), 192))
    q14 = Q_value(Interval.point(F(1, 4), 192))
    q12 = Q_value(Interval.point(F(1, 2), 192))
    j12 = j_value(Interval.point(F(1, 2), 192), params, 192)
    return ((l14 - q14).contains(0) and (l14 - q14).width() < 1e-40
            and (q12 - j12).contains(0) and (q12 - j12).width() < 1e-30)


def _soundness_battery(params) -> bool:
    from test_partition import _mid_point_fns, _random_box_and_point

    targets = _mid_point_fns(params)
    for cid in pt.claim_ids():
        rng = random.Random(hash(cid) & 0xFFFFF)
        claim = pt.get_claim(cid)
        for _ in range(100):
            box, point = _random_box_and_point(rng, claim.region)
            if cid == "QJ2" and point[1] == 1:
                point[1] = F(2097151, 2097152)
            lower = pt.bound_value(claim, box, params, 64)
            if lower.lo > targets[cid](point, 96).hi:
                return False
    return True


def test_criterion_6_property_batteries(params):
    ok = _containment_battery()
    ok = ok and _ode_battery(params)
    ok = ok and _continuity_battery(params)
    ok = ok and _soundness_battery(params)
    _line(6, bool(ok), "randomized containment (1000/op), curvature relation at "
                       "50 points, breakpoint continuity, and per-claim bound "
                       "soundness (100 random boxes each)")


def test_criterion_7_hellinger_convergence():
    # probe in the asymptotic regime: at p ~ 1e-2 higher-order terms can still
    # hold the shrink factor below 5x for some functions
    p_list = [F(1, 10**4), F(1, 10**6), F(1, 10**8)]
    maj = 0
    for x in range(8):
        if x.bit_count() >= 2:
            maj |= 1 << x
    ok = hellinger_lownoise_check(maj, 3, p_list).passed
    rng = random.Random(42)
    picked = set()
    while len(picked) < 10:
        bits = rng.sample(range(16), 8)
        m = 0
        for b in bits:
            m |= 1 << b
        picked.add(m)
    for m in sorted(picked):
        ok &= hellinger_lownoise_check(m, 4, p_list).passed
    ok &= check_sensitivity_lower(3).passed
    _line(7, bool(ok), "low-noise Hellinger ratio converges to the boundary "
                       "functional (>=5x deviation shrink per 100x) and the "
                       "balanced sensitivity lower bound holds exhaustively")


def test_criterion_8_ball_moment_decay():
    vals = []
    for n in (10, 20, 40):
        prof = hamming_ball_profile(n, n // 2, F(3, 10), prec=96)
        norm = float(prof["moment"].mid()) / (float(prof["measure"]) * float(mp.sqrt(n)))
        vals.append(norm)
    ok = vals[0] > vals[1] > vals[2]
    _line(8, ok, f"normalized Hamming-ball boundary moment strictly decreases "
                 f"across n=10,20,40 ({vals[0]:.5f} > {vals[1]:.5f} > {vals[2]:.5f})")
