"""Exhaustive small-cube checks and the exact noise operator."""

import math
from fractions import Fraction

import mpmath as mp
import pytest

from isoperim.cube import (
    CubeSet,
    boundary_profile,
    check_kahn_park,
    check_main_theorem,
    check_poincare,
    check_sensitivity_lower,
    check_sharpening,
    hamming_ball_profile,
    hellinger_lownoise_check,
    noise_operator,
    subcube_masks,
)

F = Fraction
mp.mp.dps = 30


class TestCubeSet:
    def test_size_measure_complement(self):
        A = CubeSet(2, 0b0011)
        assert A.size == 2
        assert A.measure == F(1, 2)
        assert A.complement().mask == 0b1100
        assert 0 in A and 1 in A and 2 not in A

    def test_validation(self):
        with pytest.raises(ValueError):
            CubeSet(0, 0)
        with pytest.raises(ValueError):
            CubeSet(1, 16)


class TestBoundaryProfile:
    def test_n1_singleton(self):
        prof = boundary_profile(CubeSet(1, 0b01))
        assert prof.h == (1, 0)
        assert prof.s == (1, 1)
        assert prof.dA_size == F(1, 2)
        assert prof.edge_cut == F(1, 2)

    def test_n2_edge(self):
        # {00, 01}: a 1-dimensional subcube; each member has one out-edge
        prof = boundary_profile(CubeSet(2, 0b0101))
        assert prof.h == (1, 0, 1, 0)
        assert prof.edge_cut == F(2, 4)

    def test_n3_vertex(self):
        prof = boundary_profile(CubeSet(3, 1))
        assert prof.h[0] == 3
        assert sum(prof.h) == 3
        assert prof.dA_size == F(1, 8)

    def test_empty_and_full(self):
        assert sum(boundary_profile(CubeSet(2, 0)).h) == 0
        assert sum(boundary_profile(CubeSet(2, 0b1111)).h) == 0

    def test_s_counts_both_sides(self):
        prof = boundary_profile(CubeSet(2, 0b0101))
        # outside vertices see their in-neighbors
        assert prof.s == (1, 1, 1, 1)


class TestSubcubes:
    @pytest.mark.parametrize("n,count", [(1, 3), (2, 9), (3, 27)])
    def test_counts(self, n, count):
        # sum over codim k of C(n,k) 2^k = 3^n subcubes including the full cube
        assert len(subcube_masks(n)) == count

    def test_codimensions(self):
        sc = subcube_masks(2)
        full = 0b1111
        assert sc[full] == 0
        assert sc[0b0011] == 1
        assert sc[0b0001] == 2


class TestSmallCubeTheorems:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_main_theorem(self, n, params):
        rep = check_main_theorem(n, params)
        assert rep.passed, rep.render()

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_sharpening(self, n):
        assert check_sharpening(n).passed

    @pytest.mark.parametrize("n", [2, 3])
    def test_kahn_park(self, n):
        assert check_kahn_park(n).passed

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_poincare(self, n):
        assert check_poincare(n).passed

    @pytest.mark.parametrize("n", [2, 3])
    def test_sensitivity_lower(self, n):
        assert check_sensitivity_lower(n).passed

    def test_exhaustive_limit_enforced(self):
        with pytest.raises(ValueError):
            check_main_theorem(5)
        with pytest.raises(ValueError):
            check_sharpening(5)
        with pytest.raises(ValueError):
            check_kahn_park(4)

    def test_sampled_mode_deterministic(self, params):
        a = check_main_theorem(5, params, sample=400, seed=7)
        b = check_main_theorem(5, params, sample=400, seed=7)
        assert a.passed
        assert [i.status for i in a.items[:1]] == [i.status for i in b.items[:1]]


class TestNoiseOperator:
    def test_rho_one_identity(self):
        t = [1, -1, -1, 1]
        assert noise_operator(t, F(1)) == [F(v) for v in t]

    def test_rho_zero_averages(self):
        t = [1, -1, -1, 1]
        out = noise_operator(t, F(0))
        assert all(v == F(0) for v in out)

    def test_dictator_exact(self):
        # f(x) = first bit: T_rho f = rho * f
        n = 3
        t = [1 if x & 1 else -1 for x in range(8)]
        rho = F(2, 5)
        out = noise_operator(t, rho)
        assert out == [rho * v for v in t]

    def test_matches_direct_expectation(self):
        n = 2
        t = [F(3), F(-1), F(0), F(2)]
        rho = F(1, 3)
        p = (1 - rho) / 2
        out = noise_operator(t, rho)
        for x in range(4):
            total = F(0)
            for z in range(4):
                weight = F(1)
                for i in range(n):
                    weight *= p if (z >> i & 1) else (1 - p)
                total += weight * t[x ^ z]
            assert out[x] == total

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            noise_operator([1, 2, 3], F(1, 2))
        with pytest.raises(ValueError):
            noise_operator([1, 2], F(3, 2))


class TestHammingBall:
    def test_measure(self):
        prof = hamming_ball_profile(4, 1, F(1, 2))
        assert prof["measure"] == F(5, 16)

    def test_moment_closed_form_beta_half(self):
        # n=4, r=1: C(4,1)/16 * (4-1)^{1/2} = sqrt(3)/4
        prof = hamming_ball_profile(4, 1, F(1, 2))
        ref = mp.sqrt(3) / 4
        assert float(prof["moment"].lo) <= float(ref) <= float(prof["moment"].hi)

    def test_moment_beta_zero_counts_layer(self):
        prof = hamming_ball_profile(5, 2, F(0))
        assert prof["moment"].contains(F(math.comb(5, 2), 32))

    def test_full_ball_no_boundary(self):
        prof = hamming_ball_profile(3, 3, F(1, 2))
        assert float(prof["moment"].hi) == 0.0

    def test_matches_exhaustive_profile(self):
        # cross-check against the bitmask oracle at n=3, r=1
        n, r = 3, 1
        mask = 0
        for x in range(8):
            if x.bit_count() <= r:
                mask |= 1 << x
        prof = boundary_profile(CubeSet(n, mask))
        direct = F(sum(h**2 for h in prof.h), 8)  # beta = 2
        closed = hamming_ball_profile(n, r, F(2))
        assert closed["moment"].contains(direct)

    def test_radius_validation(self):
        with pytest.raises(ValueError):
            hamming_ball_profile(3, 4, F(1, 2))

    def test_normalized_moment_decreasing_in_n(self):
        # moment / (measure * sqrt(n)) at beta = 0.3, r = floor(n/2)
        vals = []
        for n in (10, 20, 40):
            prof = hamming_ball_profile(n, n // 2, F(3, 10))
            val = float(prof["moment"].mid()) / (float(prof["measure"]) * math.sqrt(n))
            vals.append(val)
        assert vals[0] > vals[1] > vals[2]


class TestHellinger:
    def test_majority_n3(self):
        maj = 0
        for x in range(8):
            if x.bit_count() >= 2:
                maj |= 1 << x
        rep = hellinger_lownoise_check(
            maj, 3, [F(1, 100), F(1, 10**4), F(1, 10**6)]
        )
        assert rep.passed, rep.render()

    def test_unbalanced_rejected(self):
        rep = hellinger_lownoise_check(0b0001, 2, [F(1, 100)])
        assert not rep.passed

    def test_unbalanced_allowed_when_not_required(self):
        rep = hellinger_lownoise_check(
            0b0001, 2, [F(1, 100), F(1, 10**4), F(1, 10**6)], require_balanced=False
        )
        assert rep.passed

    def test_dictator_ratio_exact_at_all_noise(self):
        # for f = dictator the ratio equals E sqrt(s_f) = 1 identically,
        # so deviations are ~0 and the shrink criterion passes trivially
        t_mask = 0b0101  # first-bit dictator on n=2 (vertices 0,2 -> +1)
        rep = hellinger_lownoise_check(
            t_mask, 2, [F(1, 100), F(1, 10**4)]
        )
        assert rep.passed
