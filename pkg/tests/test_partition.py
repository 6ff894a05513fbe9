"""Claim registry, bound-function soundness, and certificate integrity."""

import dataclasses
import random
from fractions import Fraction

import gmpy2
import pytest

from isoperim.interval import Interval, const_sqrt2
from isoperim.gaussian import j_deriv, j_value
from isoperim.bellman import G_value, L_value, Q_d1, Q_value
from isoperim import partition as pt

F = Fraction


@pytest.fixture(scope="module")
def certs(params):
    """Certificates for a fast subset of claims, shared across tests."""
    return {cid: pt.verify_claim(cid, params) for cid in ("LJ1", "P1", "P2", "LJQ2", "QJQ1")}


class TestRegistry:
    def test_exact_regions_and_thresholds(self):
        expected = {
            "LJQ1": (((F(1, 16), F(1, 4)), (F(1, 2), F(3, 4))), F(1, 10**6)),
            "LJQ2": (((F(1, 2), F(3, 4)),), F(1, 10**4)),
            "LJ1": (((F(1, 2), F(5, 8)),), F(1, 100)),
            "QJQ1": (((F(1, 4), F(1, 2)), (F(1, 2), F(33, 64))), F(1, 10**5)),
            "QJQ2": (((F(1, 4), F(1, 2)), (F(33, 64), F(3, 4))), F(1, 10**7)),
            "QJ1": (((F(1, 4), F(1, 2)), (F(1, 2), F(5, 8))), F(1, 10**5)),
            "QJ2": (((F(1, 4), F(1, 2)), (F(5, 8), F(1))), F(1, 10**7)),
            "P1": (((F(1, 64), F(1, 4)),), F(1, 10**4)),
            "P2": (((F(1, 4), F(1, 2)),), F(1, 10**4)),
        }
        assert set(pt.CLAIMS) == set(expected)
        for cid, (region, thr) in expected.items():
            claim = pt.get_claim(cid)
            assert claim.region == region, cid
            assert claim.threshold == thr, cid

    def test_unknown_claim(self):
        with pytest.raises(KeyError):
            pt.get_claim("NOPE")

    def test_claim_validation(self):
        with pytest.raises(ValueError):
            pt.ClaimSpec("X", 1, ((F(0), F(1, 3)),), F(1, 10), "underline_h_P_1", "")
        with pytest.raises(ValueError):
            pt.ClaimSpec("X", 1, ((F(0), F(1, 2)),), F(-1), "underline_h_P_1", "")


# -- soundness: bound <= target at points inside the box ---------------------

def _mid_point_fns(p):
    """Target expressions, evaluated at thin points with generic enclosures."""
    s2m1 = lambda prec: const_sqrt2(prec) - 1
    P = Interval.point

    def t_LJQ1(xs, prec):
        return G_value(P(xs[0], prec), P(xs[1], prec), p, prec)

    def t_LJQ2(xs, prec):
        y = P(xs[0], prec)
        return (y - F(1, 16) + s2m1(prec) * j_value(y, p, prec)
                + L_value(P(F(1, 16), prec)) - Q_value((y + F(1, 16)).half(), prec).double())

    def t_LJ1(xs, prec):
        c = P(xs[0], prec)
        return (c.double() - F(1, 2) + s2m1(prec) * j_value(c.double() - F(1, 4), p, prec)
                + L_value(P(F(1, 4), prec)) - j_value(c, p, prec).double())

    def t_QJQ1(xs, prec):
        x, y = P(xs[0], prec), P(xs[1], prec)
        m = (x + y).half()
        return (y - x + j_value(y, p, prec) * j_deriv(y, p, prec)
                - (Q_value(m, prec).double() - Q_value(x, prec)) * Q_d1(m, prec))

    def t_QJQ2(xs, prec):
        x, y = P(xs[0], prec), P(xs[1], prec)
        m = (x + y).half()
        return ((y - x).square() + j_value(y, p, prec).square()
                - (Q_value(m, prec).double() - Q_value(x, prec)).square())

    def t_QJ1(xs, prec):
        x, y = P(xs[0], prec), P(xs[1], prec)
        m = (x + y).half()
        return (y - x + (j_value(m, p, prec).double() - Q_value(x, prec))
                * (j_deriv(m, p, prec) - Q_d1(x, prec)))

    def t_QJ2(xs, prec):
        x, y = P(xs[0], prec), P(xs[1], prec)
        m = (x + y).half()
        return (((y - x).square() + j_value(y, p, prec).square()).sqrt()
                + Q_value(x, prec) - j_value(m, p, prec).double())

    def t_P1(xs, prec):
        x = P(xs[0], prec)
        return ((L_value(x, prec) + j_value(1 - x, p, prec)).half()
                - (x * (1 - x)).double())

    def t_P2(xs, prec):
        x = P(xs[0], prec)
        return (-(Q_d1(x, prec).half()) + j_deriv(1 - x, p, prec).half()
                - x.scale2(2) + 2)

    return {
        "LJQ1": t_LJQ1, "LJQ2": t_LJQ2, "LJ1": t_LJ1, "QJQ1": t_QJQ1,
        "QJQ2": t_QJQ2, "QJ1": t_QJ1, "QJ2": t_QJ2, "P1": t_P1, "P2": t_P2,
    }


def _random_box_and_point(rng, region):
    box = []
    point = []
    for lo, hi in region:
        d = hi - lo
        # random dyadic sub-box
        k = rng.randint(2, 8)
        i = rng.randint(0, 2**k - 1)
        a = lo + d * F(i, 2**k)
        b = lo + d * F(i + 1, 2**k)
        box.append((a, b))
        t = F(rng.randint(0, 64), 64)
        point.append(a + (b - a) * t)
    return tuple(box), point


class TestSoundness:
    @pytest.mark.parametrize("cid", list(pt.CLAIMS))
    def test_bound_below_target_at_100_random_points(self, cid, params):
        rng = random.Random(hash(cid) & 0xFFFF)
        claim = pt.get_claim(cid)
        target = _mid_point_fns(params)[cid]
        for _ in range(100):
            box, point = _random_box_and_point(rng, claim.region)
            if cid == "QJ2" and point[1] == 1:
                point[1] = F(2097151, 2097152)  # J' target undefined exactly at 1
            lower = pt.bound_value(claim, box, params, 64)
            true_val = target(point, 96)
            assert lower.lo <= true_val.hi, (box, point)

    @pytest.mark.parametrize("cid", list(pt.CLAIMS))
    def test_monotone_refinement(self, cid, params):
        """Splitting a box should (almost always) not worsen the bound."""
        from isoperim.subdivide import split_box

        rng = random.Random(hash(cid) & 0xFFF)
        claim = pt.get_claim(cid)
        improved = total = 0
        for _ in range(40):
            box, _ = _random_box_and_point(rng, claim.region)
            parent = pt.bound_value(claim, box, params, 64).lo
            for child in split_box(box):
                total += 1
                if pt.bound_value(claim, child, params, 64).lo >= parent:
                    improved += 1
        assert improved / total >= 0.95

    def test_box_outside_region_rejected(self, params):
        claim = pt.get_claim("P1")
        from isoperim.interval import DomainError

        with pytest.raises(DomainError):
            pt.bound_value(claim, ((F(1, 128), F(1, 64)),), params, 64)

    def test_whole_region_bound_forces_subdivision_LJ1(self, params):
        claim = pt.get_claim("LJ1")
        whole = pt.bound_value(claim, claim.region, params, 64)
        assert whole.lo < gmpy2.mpq(1, 100)

    def test_point_box_values(self, params):
        qjq2 = pt.get_claim("QJQ2")
        v = pt.bound_value(qjq2, ((F(1, 4), F(1, 4)), (F(33, 64), F(33, 64))), params, 64)
        assert v.certainly_gt(0)
        p1 = pt.get_claim("P1")
        v = pt.bound_value(p1, ((F(1, 4), F(1, 4)),), params, 96)
        ref = ((L_value(Interval.point(F(1, 4), 96))
                + j_value(Interval.point(F(3, 4), 96), params, 96)).half()
               - Interval.point(F(3, 8), 96))
        assert v.contains(ref) or (v - ref).contains(0)


class TestVerifyClaim:
    def test_LJ1_verifies(self, certs):
        cert = certs["LJ1"]
        assert cert.status == "verified"
        assert all(leaf.bound_lo > gmpy2.mpq(1, 100) for leaf in cert.leaves)

    def test_raised_threshold_inconclusive(self, params):
        claim = dataclasses.replace(pt.get_claim("LJQ1"), threshold=F(1, 2))
        # G[B] dips well below 1/2 on this region: point evaluation at (1/16, 1/2)
        g = G_value(Interval.point(F(1, 16), 96), Interval.point(F(1, 2), 96), params)
        assert g.certainly_lt(F(1, 2))
        cert = pt.verify_claim(claim, params, max_depth=10)
        assert cert.status == "inconclusive"
        assert cert.offending_box is not None

    def test_insufficient_depth(self, params):
        cert = pt.verify_claim("LJQ2", params, max_depth=1, ladder=(64,))
        assert cert.status == "inconclusive"


class TestCertificates:
    def test_roundtrip(self, certs, params):
        cert = certs["P1"]
        text = cert.to_text()
        back = pt.Certificate.from_text(text)
        assert back.to_text() == text
        assert pt.check_certificate(back, params)

    def test_leaf_deletion_detected(self, certs, params):
        cert = certs["P2"]
        bad = dataclasses.replace(cert, leaves=cert.leaves[:-1])
        assert not pt.check_certificate(bad, params)

    def test_bound_edit_detected(self, certs, params):
        cert = certs["LJ1"]
        leaf = cert.leaves[0]
        forged = pt.Leaf(box=leaf.box, bound_lo=gmpy2.mpfr("0.5", leaf.prec), prec=leaf.prec)
        bad = dataclasses.replace(cert, leaves=[forged] + cert.leaves[1:])
        assert not pt.check_certificate(bad, params)

    def test_duplicated_leaf_detected(self, certs, params):
        cert = certs["LJQ2"]
        bad = dataclasses.replace(cert, leaves=cert.leaves + [cert.leaves[0]])
        assert not pt.check_certificate(bad, params)

    def test_inconclusive_certificate_rejected(self, params):
        cert = pt.verify_claim("LJQ2", params, max_depth=1, ladder=(64,))
        assert not pt.check_certificate(cert, params)

    def test_hex_endpoints_bit_exact(self, certs):
        cert = certs["QJQ1"]
        back = pt.Certificate.from_text(cert.to_text())
        for a, b in zip(cert.leaves, back.leaves):
            assert a.box == b.box
            assert a.bound_lo == b.bound_lo and a.prec == b.prec

    def test_wrong_w_reverified(self, certs):
        # checking under a different weight recomputes and (generally) rejects
        cert = certs["LJ1"]
        other = dataclasses.replace(cert, w=F(9, 10))
        assert not pt.check_certificate(other)


class TestVerifyAll:
    def test_subset_and_determinism_across_jobs(self, params):
        ids = ["P1", "P2", "LJ1"]
        r1, c1 = pt.verify_all(params, jobs=1, include_analytic=False, claims=ids)
        r2, c2 = pt.verify_all(params, jobs=3, include_analytic=False, claims=ids)
        assert r1.passed and r2.passed
        for cid in ids:
            assert c1[cid].to_text() == c2[cid].to_text()

    def test_max_depth_2_inconclusive(self, params):
        report, certs = pt.verify_all(
            params, max_depth=2, ladder=(64,), jobs=1,
            include_analytic=False, claims=["LJQ1", "LJ1"],
        )
        assert not report.passed
        assert any(c.status == "inconclusive" for c in certs.values())

    def test_report_generated_for_other_w(self):
        from isoperim.gaussian import BellmanParams

        p = BellmanParams.create(w=F(9, 10))
        report, _ = pt.verify_all(
            p, max_depth=8, ladder=(64,), jobs=1,
            include_analytic=False, claims=["P2"],
        )
        assert len(report.items) == 1  # reporting contract regardless of outcome
