import math
from fractions import Fraction

import numpy as np
import pytest

from horolab import diophantine as dio
from horolab import group
from horolab.errors import DivisionNearZero, EnumerationOverflow, PrecisionExhausted


def exact_e_minus_2_digits(depth):
    # interval oracle from the factorial series: S_K < e - 2 < S_K + 2/(K+1)!
    K = 40
    s = sum(Fraction(1, math.factorial(k)) for k in range(K + 1)) - 2
    lo, hi = s, s + Fraction(2, math.factorial(K + 1))
    cl = dio.cf_expand(lo, depth + 1)
    ch = dio.cf_expand(hi, depth + 1)
    assert cl.a0 == ch.a0 == 0
    agree = []
    for u, v in zip(cl.digits, ch.digits):
        if u != v:
            break
        agree.append(u)
    assert len(agree) >= depth
    return tuple(agree[:depth])


class TestExpansion:
    def test_rational_euclidean(self):
        cf = dio.cf_expand(Fraction(415, 93), 10)
        assert cf.a0 == 4
        assert cf.digits == (2, 6, 7)

    def test_sqrt2_all_twos(self):
        cf = dio.cf_expand(dio.SQRT2, 40)
        assert cf.a0 == 1
        assert cf.digits == (2,) * 40

    def test_golden_all_ones(self):
        cf = dio.cf_expand(dio.GOLDEN, 40)
        assert cf.a0 == 1
        assert cf.digits == (1,) * 40

    def test_float_agrees_with_exact_prefix(self):
        # binary64 sqrt(2) certifies ~16 digits under the 1000-ulp slack
        # (q_k ~ 2.414^k outruns the interval width); golden's slower ladder
        # certifies ~29
        cf = dio.cf_expand(math.sqrt(2), 15)
        assert cf.a0 == 1
        assert cf.digits == (2,) * 15
        cf = dio.cf_expand((1 + math.sqrt(5)) / 2, 28)
        assert cf.digits == (1,) * 28

    def test_float_wall(self):
        with pytest.raises(PrecisionExhausted):
            dio.cf_expand(math.sqrt(2), 61)

    def test_float_near_rational_exhausts(self):
        with pytest.raises(PrecisionExhausted):
            dio.cf_expand(0.5, 3)

    def test_digit_positivity_guard(self):
        with pytest.raises(ValueError):
            dio.ContinuedFraction(0, (1, 0, 2))

    def test_e_minus_2_digit_pattern(self):
        digits = exact_e_minus_2_digits(10)
        assert digits == (1, 2, 1, 1, 4, 1, 1, 6, 1, 1)


class TestConvergents:
    def test_fibonacci(self):
        cv = dio.convergents(dio.ContinuedFraction(1, (1, 1, 1, 1)))
        assert [(c.p, c.q) for c in cv] == [(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)]

    def test_hand_checked(self):
        cv = dio.convergents(dio.ContinuedFraction(0, (2, 2, 2)))
        assert [(c.p, c.q) for c in cv] == [(0, 1), (1, 2), (2, 5), (5, 12)]

    def test_determinant_identity_random(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            digits = tuple(int(d) for d in rng.integers(1, 10, size=12))
            pairs = dio.convergent_pairs(dio.ContinuedFraction(int(rng.integers(0, 5)), digits))
            for k in range(1, len(pairs)):
                p1, q1 = pairs[k]
                p0, q0 = pairs[k - 1]
                assert p1 * q0 - p0 * q1 == (-1) ** (k - 1)

    def test_error_bounds_hold_exactly(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            digits = tuple(int(d) for d in rng.integers(1, 10, size=14))
            cf = dio.ContinuedFraction(0, digits)
            # exact value of the full expansion
            x = Fraction(0)
            for d in reversed(digits):
                x = 1 / (d + x)
            for c in dio.convergents(cf)[:-1]:
                gap = abs(x - c.value())
                # equality happens at the level just before a terminating
                # tail (the tail is exactly the final digit there)
                assert gap <= c.err_bound
                assert gap < Fraction(1, c.q ** 2)
                assert math.gcd(c.p, c.q) == 1


class TestTypeEstimate:
    def test_golden_near_two(self):
        assert 2.0 <= dio.dioph_type_estimate(dio.GOLDEN, 30) <= 2.1

    def test_sqrt2_near_two(self):
        assert 2.0 <= dio.dioph_type_estimate(dio.SQRT2, 30) <= 2.1

    def test_float_inputs_match_surds(self):
        assert 2.0 <= dio.dioph_type_estimate((1 + math.sqrt(5)) / 2, 30) <= 2.1
        assert 2.0 <= dio.dioph_type_estimate(math.sqrt(2), 30) <= 2.1

    def test_rational_rejected(self):
        with pytest.raises(PrecisionExhausted):
            dio.dioph_type_estimate(Fraction(2, 7), 20)

    def test_constructed_number_is_type_100(self):
        cf, _ = dio.construct_non_dioph_100()
        assert dio.dioph_type_estimate(cf, cf.depth) >= 100.0


class TestBadlyApproximable:
    def test_sqrt2(self):
        assert dio.is_badly_approximable(dio.SQRT2, 40, 2) is True

    def test_golden(self):
        assert dio.is_badly_approximable(dio.GOLDEN, 40, 1) is True

    def test_e_minus_2_fails_bound_three(self):
        assert dio.is_badly_approximable(math.e - 2, 20, 3) is False
        # same verdict from the exact series digits
        cf = dio.ContinuedFraction(0, exact_e_minus_2_digits(20))
        assert dio.is_badly_approximable(cf, 20, 3) is False

    def test_inconclusive_prefix_raises(self):
        # float pi certifies well under 50 digits and none of them exceed 1000
        with pytest.raises(PrecisionExhausted):
            dio.is_badly_approximable(math.pi, 50, 1000)


class TestConstruction:
    def test_certificates(self):
        cf, apx = dio.construct_non_dioph_100()
        assert cf.a0 == 0
        assert len(apx) == 2
        # the ladder tops out near 10^3 before the schedule explodes
        assert apx[0].q == 987
        assert apx[0].p == 610
        for a in apx:
            assert math.gcd(a.p, a.q) == 1
            assert a.err_bound <= Fraction(1, a.q ** 100)

    def test_gap_bounds_bracket_truth(self):
        cf, apx = dio.construct_non_dioph_100()
        pairs = dio.convergent_pairs(cf)
        # any point between the last two convergents is a valid stand-in
        # for x; the certified levels are far enough up the ladder that the
        # bracket is unambiguous
        x = (Fraction(*pairs[-1]) + Fraction(*pairs[-2])) / 2
        a = apx[0]
        gap = abs(x - a.value())
        assert gap <= a.err_bound


class TestLambdaSeries:
    def test_nearest_int_dist(self):
        assert math.isclose(dio.nearest_int_dist(1.3), 0.3, rel_tol=1e-12)
        assert dio.nearest_int_dist(-0.2) == 0.2

    def test_monotone(self):
        a = dio.lambda_partial(math.sqrt(2), 2, 100)
        b = dio.lambda_partial(math.sqrt(2), 2, 200)
        assert b > a

    def test_tail_small(self):
        a = dio.lambda_partial(math.sqrt(2), 2, 1000)
        b = dio.lambda_partial(math.sqrt(2), 2, 10000)
        assert 0 < b - a < 0.5

    def test_doubling_envelope(self):
        # increments scale like (digit bound) * log N / N; the bare 1/N
        # shape misses the three-distance log factor
        for n in (500, 1000, 2000, 4000):
            d = dio.lambda_partial(math.sqrt(2), 2, 2 * n) - dio.lambda_partial(
                math.sqrt(2), 2, n
            )
            assert d < 2 * 2 * math.log(2 * n) / n

    def test_slow_exponent_bounded(self):
        vals = [dio.lambda_partial(math.sqrt(2), 1.2, n) for n in (500, 1000, 2000)]
        assert vals[-1] < 50

    def test_rational_alpha_detected(self):
        with pytest.raises(DivisionNearZero):
            dio.lambda_partial(0.5, 2, 10)

    def test_s_guard(self):
        with pytest.raises(ValueError):
            dio.lambda_partial(math.sqrt(2), 1.0, 10)


class TestLatticeType:
    def test_badly_approximable_point_flat(self):
        p = group.reduce_psl2z(group.lower_unipotent(math.sqrt(2) - 1))
        prof = dio.lattice_dioph_type(p, 8.0, 17)
        assert prof.kappa_hat <= 0.15

    def test_rational_point_steep(self):
        p = group.reduce_psl2z(group.lower_unipotent(0.5))
        prof = dio.lattice_dioph_type(p, 8.0, 17)
        assert prof.kappa_hat >= 0.7
        # once inside the cusp the decay rate is exactly 1
        tail = [(t, math.log(e)) for t, e in prof.samples if t >= 4.0]
        ts = [t for t, _ in tail]
        ys = [v for _, v in tail]
        mt = sum(ts) / len(ts)
        my = sum(ys) / len(ys)
        slope = sum((t - mt) * (y - my) for t, y in zip(ts, ys)) / sum(
            (t - mt) ** 2 for t in ts
        )
        assert math.isclose(slope, -1.0, abs_tol=1e-9)

    def test_identity_profile(self):
        p = group.reduce_psl2z(group.IDENTITY)
        prof = dio.lattice_dioph_type(p, 6.0, 13)
        assert math.isclose(prof.samples[0][1], 1.0, rel_tol=1e-12)
        assert prof.kappa_hat >= 0.95

    def test_overflow_propagates(self):
        p = group.reduce_psl2z(group.IDENTITY)
        with pytest.raises(EnumerationOverflow):
            dio.lattice_dioph_type(p, 12.0, 13)

    def test_kappa_in_range(self):
        rng = np.random.default_rng(31)
        for _ in range(5):
            p = group.reduce_psl2z(group.lower_unipotent(rng.uniform(0.1, 0.9)))
            prof = dio.lattice_dioph_type(p, 5.0, 11)
            assert 0.0 <= prof.kappa_hat <= 1.0
