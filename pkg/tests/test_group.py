import math

import numpy as np
import pytest

from horolab import group
from horolab.errors import EnumerationOverflow
from horolab.group import (
    BASE_POINT,
    IDENTITY,
    OMEGA,
    GroupElement,
    HalfPlanePoint,
    a_t,
    bruhat_decompose,
    compose,
    cusp_excursion,
    effective_radius,
    hyperbolic_distance,
    injectivity_eta,
    invert,
    mobius_act,
    reduce_psl2z,
    u0,
    word_to_gamma,
)


def rand_element(rng):
    # random product of flows and unipotents keeps entries in a sane range
    g = IDENTITY
    for _ in range(4):
        pick = rng.integers(0, 3)
        if pick == 0:
            g = compose(g, u0(rng.uniform(-3, 3)))
        elif pick == 1:
            g = compose(g, a_t(rng.uniform(-2, 2)))
        else:
            g = compose(g, group.lower_unipotent(rng.uniform(-3, 3)))
    return g


class TestGroupArithmetic:
    def test_unipotent_one_parameter_law(self):
        assert compose(u0(1.5), u0(2.5)).close_to(u0(4.0))

    def test_flow_conjugates_unipotent(self):
        t = math.log(4)
        lhs = compose(a_t(t), compose(u0(1.0), invert(a_t(t))))
        assert lhs.close_to(u0(0.25))

    def test_invert_integer_matrix(self):
        # adjugate of (2,1;1,1) is (1,-1;-1,2); stored sign-normalized
        g = GroupElement(2, 1, 1, 1)
        assert invert(g).close_to(GroupElement(1, -1, -1, 2))
        assert invert(g).entries() == (-1, 1, 1, -2)

    def test_group_laws_random(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            g, h, k = (rand_element(rng) for _ in range(3))
            lhs = compose(compose(g, h), k)
            rhs = compose(g, compose(h, k))
            assert lhs.close_to(rhs, tol=1e-10)
            assert compose(g, invert(g)).close_to(IDENTITY, tol=1e-10)
            assert compose(g, IDENTITY).close_to(g)

    def test_flow_additivity(self):
        assert compose(a_t(0.7), a_t(1.1)).close_to(a_t(1.8))

    def test_omega_squares_to_identity(self):
        assert compose(OMEGA, OMEGA).close_to(IDENTITY)

    def test_det_guard(self):
        with pytest.raises(ValueError):
            GroupElement(1, 0, 0, 2)


class TestMobius:
    def test_omega_fixes_i(self):
        z = mobius_act(OMEGA, BASE_POINT)
        assert math.isclose(z.x, 0.0, abs_tol=1e-15)
        assert math.isclose(z.y, 1.0, rel_tol=1e-15)

    def test_translation(self):
        z = mobius_act(u0(1.0), BASE_POINT)
        assert (z.x, z.y) == (1.0, 1.0)

    def test_flow_scales(self):
        z = mobius_act(a_t(math.log(4)), BASE_POINT)
        assert math.isclose(z.x, 0.0, abs_tol=1e-15)
        assert math.isclose(z.y, 0.25, rel_tol=1e-12)

    def test_equivariance(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            g, h = rand_element(rng), rand_element(rng)
            z = HalfPlanePoint(rng.uniform(-2, 2), math.exp(rng.uniform(-2, 2)))
            once = mobius_act(compose(g, h), z)
            twice = mobius_act(g, mobius_act(h, z))
            assert math.isclose(once.x, twice.x, abs_tol=1e-10)
            assert math.isclose(once.y, twice.y, rel_tol=1e-10)

    def test_isometry(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            g = rand_element(rng)
            z1 = HalfPlanePoint(rng.uniform(-2, 2), math.exp(rng.uniform(-1, 1)))
            z2 = HalfPlanePoint(rng.uniform(-2, 2), math.exp(rng.uniform(-1, 1)))
            d0 = hyperbolic_distance(z1, z2)
            d1 = hyperbolic_distance(mobius_act(g, z1), mobius_act(g, z2))
            assert math.isclose(d0, d1, rel_tol=1e-10, abs_tol=1e-10)

    def test_y_positive(self):
        with pytest.raises(ValueError):
            HalfPlanePoint(0.0, -1.0)


class TestReduction:
    def in_domain(self, z, tol=1e-9):
        return abs(z.x) <= 0.5 + tol and z.x * z.x + z.y * z.y >= 1 - tol

    def test_already_reduced(self):
        g = compose(u0(0.1), a_t(-math.log(5)))  # image 0.1 + 5i
        p = reduce_psl2z(g)
        assert p.word == ()
        assert p.reduced.close_to(g)

    def test_single_inversion(self):
        g = a_t(math.log(4))  # image i/4
        p = reduce_psl2z(g)
        z = p.image()
        assert math.isclose(z.y, 4.0, rel_tol=1e-12)
        assert math.isclose(z.x, 0.0, abs_tol=1e-12)

    def test_gauss_oracle_value(self):
        # stepwise Gauss reduction of 2.5 + 0.5i lands exactly on i,
        # via the word T^{-2}, S, T (computed with exact rationals)
        g = compose(u0(2.5), a_t(math.log(2)))  # image 2.5 + 0.5i
        p = reduce_psl2z(g)
        z = p.image()
        assert math.isclose(z.x, 0.0, abs_tol=1e-12)
        assert math.isclose(z.y, 1.0, rel_tol=1e-12)
        assert p.word == (("T", -2), ("S",), ("T", 1))

    def test_invariants_random(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            g = rand_element(rng)
            p = reduce_psl2z(g)
            assert self.in_domain(p.image())
            gamma = word_to_gamma(p.word)
            assert compose(gamma, g).close_to(p.reduced, tol=1e-9)
            # idempotence
            again = reduce_psl2z(p.reduced)
            assert again.word == ()

    def test_gamma_independence(self):
        rng = np.random.default_rng(13)
        gammas = [
            GroupElement(1, 1, 0, 1),
            GroupElement(0, -1, 1, 0),
            GroupElement(2, 1, 1, 1),
            GroupElement(5, 2, 2, 1),
        ]
        for _ in range(100):
            g = rand_element(rng)
            z0 = reduce_psl2z(g).image()
            gam = gammas[rng.integers(0, len(gammas))]
            z1 = reduce_psl2z(compose(gam, g)).image()
            assert math.isclose(z0.x, z1.x, abs_tol=1e-9)
            assert math.isclose(z0.y, z1.y, rel_tol=1e-9)


class TestBruhat:
    def test_lower_unipotent_is_its_own_factor(self):
        f = bruhat_decompose(group.lower_unipotent(0.7))
        assert f.branch == "UAU-"
        assert math.isclose(f.s, 0.0, abs_tol=1e-15)
        assert math.isclose(f.t, 0.0, abs_tol=1e-15)
        assert math.isclose(f.y, 0.7, rel_tol=1e-15)

    def test_omega_branch(self):
        f = bruhat_decompose(OMEGA)
        assert f.branch == "wAU-"
        assert math.isclose(f.t, 0.0, abs_tol=1e-15)
        assert math.isclose(f.y, 0.0, abs_tol=1e-15)

    def test_integer_example(self):
        f = bruhat_decompose(GroupElement(2, 1, 1, 1))
        assert f.branch == "UAU-"
        assert math.isclose(f.s, 1.0)
        assert math.isclose(f.t, 0.0, abs_tol=1e-15)
        assert math.isclose(f.y, 1.0)
        assert f.recompose().close_to(GroupElement(2, 1, 1, 1), tol=1e-12)

    def test_recomposition_random(self):
        rng = np.random.default_rng(17)
        for _ in range(300):
            g = rand_element(rng)
            f = bruhat_decompose(g)
            assert f.recompose().close_to(g, tol=1e-10)


class TestCuspExcursion:
    def test_identity_linear(self):
        p = reduce_psl2z(IDENTITY)
        assert math.isclose(cusp_excursion(p, 3.0), 3.0, rel_tol=1e-12)
        assert cusp_excursion(p, 0.0) == 0.0

    def test_rational_point_profile(self):
        # the half-integer cusp point: distance climbs like t - 2 log q + O(1)
        # once the excursion is underway and keeps climbing (the saturation
        # of the paper's closed-orbit comparison lives in r(p,T), not here)
        p = reduce_psl2z(group.lower_unipotent(0.5))
        prof = [cusp_excursion(p, float(t)) for t in range(1, 11)]
        assert all(b > a for a, b in zip(prof[4:], prof[5:]))
        gaps = [b - a for a, b in zip(prof[5:], prof[6:])]
        for gap in gaps:
            assert math.isclose(gap, 1.0, abs_tol=0.05)

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            cusp_excursion(reduce_psl2z(IDENTITY), -1.0)


def eta_reference(x, y, box=25):
    # brute-force enumeration over the entry box, used as the oracle
    best = None
    for a in range(-box, box + 1):
        for c in range(0, box + 1):
            for d in range(-box, box + 1):
                if c == 0:
                    if a * d != 1:
                        continue
                    bs = range(-box, box + 1)
                else:
                    if (a * d - 1) % c != 0:
                        continue
                    bs = [(a * d - 1) // c]
                for b in bs:
                    for s in (1, -1):
                        aa, bb, cc, dd = s * a, s * b, s * c, s * d
                        if (aa, bb, cc, dd) == (1, 0, 0, 1):
                            continue
                        m00 = aa - x * cc
                        m01 = (aa * x + bb - x * (cc * x + dd)) / y
                        m10 = cc * y
                        m11 = cc * x + dd
                        v = (m00 - 1) ** 2 + m01 ** 2 + m10 ** 2 + (m11 - 1) ** 2
                        if best is None or v < best:
                            best = v
    return math.sqrt(best)


class TestInjectivityEta:
    def test_identity_coset(self):
        val = injectivity_eta(reduce_psl2z(IDENTITY))
        assert math.isclose(val, 1.0, rel_tol=1e-12)

    def test_flowed_identity_decays(self):
        p = reduce_psl2z(a_t(-2.0))
        assert math.isclose(injectivity_eta(p), math.exp(-2.0), rel_tol=1e-10)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(23)
        for _ in range(12):
            g = rand_element(rng)
            p = reduce_psl2z(g)
            z = p.image()
            assert math.isclose(
                injectivity_eta(p), eta_reference(z.x, z.y), rel_tol=1e-9
            )

    def test_deep_cusp_overflow(self):
        p = reduce_psl2z(a_t(-8.0))
        with pytest.raises(EnumerationOverflow):
            injectivity_eta(p)

    def test_probe_ratio_comparable(self):
        # r(p,T) and T * eta(g_{log T} p) agree up to bounded factors
        p = reduce_psl2z(IDENTITY)
        for big_t in (10.0, 100.0, 1000.0):
            r = effective_radius(p, big_t)
            flowed = reduce_psl2z(compose(p.reduced, a_t(-math.log(big_t))))
            ratio = r / (big_t * injectivity_eta(flowed))
            assert 0.1 <= ratio <= 10.0
