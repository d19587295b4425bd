"""Differential forms on F_q(t): Cartier operator, B-filtration, residues."""

import random

import pytest

from wittsym import cartier, d, dlog, enumerate_places, inv_cartier, make_field, make_ratfunc_field
from wittsym.errors import NoPreimage, UnsupportedDegree
from wittsym.forms import (
    antiderivative,
    b_level,
    form_invariant_vector,
    form_residue_invariant,
    form_to_str,
    h_group_r1,
    is_exact,
    parse_form,
    wp_form,
    wp_preimage_in_chain,
    wp_surjective_on_Binf,
    zero_form,
)
from wittsym.funcfield import Poly, RatFunc, parse_ratfunc, place_to_str


def _random_func(rng, rff, max_deg, nonzero=False):
    base = rff.base
    while True:
        num = Poly(base, tuple(base.elem_by_index(rng.randrange(base.q))
                               for _ in range(max_deg + 1)))
        den = Poly(base, tuple(base.elem_by_index(rng.randrange(base.q))
                               for _ in range(max_deg + 1)))
        if den.is_zero():
            continue
        f = RatFunc(rff, num, den)
        if not nonzero or not f.is_zero():
            return f


class TestDerivationAndDlog:
    def test_d_is_linear_and_leibniz(self, r2t, r3t):
        rng = random.Random(3)
        for rff in (r2t, r3t):
            for _ in range(25):
                f = _random_func(rng, rff, 3)
                g = _random_func(rng, rff, 3)
                assert d(f + g) == d(f) + d(g)
                assert d(f * g) == DiffFormMul(f, d(g)) + DiffFormMul(g, d(f))

    def test_d_kills_pth_powers(self, r2t, r3t):
        rng = random.Random(5)
        for rff in (r2t, r3t):
            for _ in range(20):
                f = _random_func(rng, rff, 3)
                assert d(f.pth_power()).is_zero()

    def test_dlog_turns_products_into_sums(self, r2t, r3t):
        rng = random.Random(7)
        for rff in (r2t, r3t):
            for _ in range(20):
                f = _random_func(rng, rff, 3, nonzero=True)
                g = _random_func(rng, rff, 3, nonzero=True)
                assert dlog(f * g) == dlog(f) + dlog(g)


def DiffFormMul(f, omega):
    """f * (g dt) as a form."""
    return type(omega)(omega.ring, omega.degree, f * omega.coeff)


class TestCartier:
    def test_frozen_small_cases(self, r2t, r3t):
        t2 = parse_ratfunc("t", r2t)
        # characteristic 2: C(dt) = 0, C(t dt) = dt, C(dt/t) = dt/t.
        assert cartier(d(t2)).is_zero()
        assert cartier(DiffFormMul(t2, d(t2))) == d(t2)
        assert cartier(dlog(t2)) == dlog(t2)
        # characteristic 3: C(t^2 dt) = dt, C(t dt) = 0.
        t3 = parse_ratfunc("t", r3t)
        assert cartier(DiffFormMul(t3 * t3, d(t3))) == d(t3)
        assert cartier(DiffFormMul(t3, d(t3))).is_zero()

    def test_additive_and_semilinear(self, r2t, r3t):
        rng = random.Random(11)
        for rff in (r2t, r3t):
            for _ in range(20):
                f = _random_func(rng, rff, 2)
                om1 = DiffFormMul(_random_func(rng, rff, 2), d(rff.t))
                om2 = DiffFormMul(_random_func(rng, rff, 2), d(rff.t))
                assert cartier(om1 + om2) == cartier(om1) + cartier(om2)
                # C(f^p w) = f C(w)
                assert cartier(DiffFormMul(f.pth_power(), om1)) == DiffFormMul(
                    f, cartier(om1)
                )

    def test_kills_derivatives_and_fixes_dlog(self, r2t, r3t):
        rng = random.Random(13)
        for rff in (r2t, r3t):
            for _ in range(20):
                g = _random_func(rng, rff, 3)
                assert cartier(d(g)).is_zero()
                u = _random_func(rng, rff, 3, nonzero=True)
                assert cartier(dlog(u)) == dlog(u)

    def test_inverse_identity(self, r2t, r3t):
        rng = random.Random(17)
        for rff in (r2t, r3t):
            for _ in range(25):
                om = DiffFormMul(_random_func(rng, rff, 3), d(rff.t))
                assert cartier(inv_cartier(om)) == om

    def test_inv_cartier_additive(self, r2t):
        rng = random.Random(19)
        for _ in range(15):
            om1 = DiffFormMul(_random_func(rng, r2t, 3), d(r2t.t))
            om2 = DiffFormMul(_random_func(rng, r2t, 3), d(r2t.t))
            assert inv_cartier(om1 + om2) == inv_cartier(om1) + inv_cartier(om2)


class TestExactness:
    def test_antiderivative_inverts_d(self, r2t, r3t):
        rng = random.Random(23)
        for rff in (r2t, r3t):
            for _ in range(25):
                g = _random_func(rng, rff, 3)
                om = d(g)
                if om.is_zero():
                    continue
                assert d(antiderivative(om)) == om

    def test_antiderivative_refuses_nonexact(self, r2t, r3t):
        for rff in (r2t, r3t):
            with pytest.raises(NoPreimage):
                antiderivative(dlog(rff.t))

    def test_is_exact_iff_cartier_vanishes(self, r2t, r3t):
        rng = random.Random(29)
        for rff in (r2t, r3t):
            for _ in range(25):
                om = DiffFormMul(_random_func(rng, rff, 2), d(rff.t))
                assert is_exact(om) == cartier(om).is_zero()
                if is_exact(om):
                    assert d(antiderivative(om)) == om


class TestBFiltration:
    def test_frozen_levels(self, r2t, r3t):
        # level 1 = exact; each inverse-Cartier application raises it by one.
        dt = d(r2t.t)
        assert b_level(dt, 4).level == 1
        assert b_level(inv_cartier(dt), 4).level == 2
        assert b_level(inv_cartier(inv_cartier(dt)), 4).level == 3
        assert b_level(dlog(r2t.t), 4).level is None  # logarithmic, not in B_infinity
        dt3 = d(r3t.t)
        assert b_level(dt3, 4).level == 1
        assert b_level(inv_cartier(dt3), 4).level == 2

    def test_chain_is_cartier_orbit(self, r2t):
        # the recorded chain is C(w), C^2(w), ... down to the first zero
        om = inv_cartier(inv_cartier(d(r2t.t)))
        cls = b_level(om, 4)
        assert cls.level == 3
        c1 = cartier(om)
        c2 = cartier(c1)
        c3 = cartier(c2)
        assert list(cls.chain) == [c1, c2, c3]
        assert c3.is_zero()

    def test_wp_preimage_telescopes(self, r2t, r3t):
        # y with (inverse Cartier - id)(y) = omega modulo exact forms.
        for rff in (r2t, r3t):
            for om in [d(rff.t), inv_cartier(d(rff.t))]:
                y = wp_preimage_in_chain(om, 4)
                assert y is not None
                assert is_exact(wp_form(y) - om)

    def test_wp_surjective_on_b_infinity(self, f2, f3):
        for F in (f2, f3):
            ok, checked = wp_surjective_on_Binf(F, 2, 3)
            assert ok
            assert checked > 0


class TestResiduesAndHGroup:
    def test_residue_invariants(self, r2t, r3t):
        places2 = {place_to_str(v): v for v in enumerate_places(r2t, 2)}
        assert form_residue_invariant(dlog(r2t.t), places2["(t)"]) == 1
        assert form_residue_invariant(dlog(r2t.t), places2["inf"]) == 1  # -1 mod 2
        assert form_residue_invariant(dlog(r2t.t), places2["(t+1)"]) == 0
        # degree-2 place over F_3: residue 1 has trace 2.
        places3 = {place_to_str(v): v for v in enumerate_places(r3t, 2)}
        f = parse_ratfunc("t^2+1", r3t)
        assert form_residue_invariant(dlog(f), places3["(t^2+1)"]) == 2

    def test_invariant_vector_of_dlog_sums_to_zero(self, r2t, r3t):
        rng = random.Random(31)
        for rff in (r2t, r3t):
            p = rff.base.p
            for _ in range(20):
                f = _random_func(rng, rff, 2, nonzero=True)
                vec = form_invariant_vector(dlog(f), 3)
                assert sum(vec.values()) % p == 0

    def test_h_group_addresses_classes_by_invariants(self, f2, r2t):
        H = h_group_r1(f2, 1, 2)
        # dlog t is a nonzero class with invariants 1 at (t) and at infinity
        assert not H.class_is_zero(dlog(r2t.t))
        assert H.class_invariants(dlog(r2t.t)) == [1, 0, 1, 0]
        # forms without poles in the window are zero classes
        g = parse_ratfunc("t^2+t", r2t)
        assert H.class_is_zero(DiffFormMul(g, d(r2t.t)))
        # adding an exact form does not move the class
        assert H.classes_equal(dlog(r2t.t), dlog(r2t.t) + d(g))

    def test_higher_weights_vanish_and_degree_guard(self, f2):
        assert h_group_r1(f2, 2, 2).order() == 1
        with pytest.raises(UnsupportedDegree):
            h_group_r1(f2, 0, 2)


class TestFormParsing:
    def test_roundtrip(self, r2t):
        rng = random.Random(37)
        for _ in range(20):
            om = DiffFormMul(_random_func(rng, r2t, 3), d(r2t.t))
            assert parse_form(form_to_str(om), r2t) == om
        assert parse_form("1/(t) * dt", r2t) == dlog(r2t.t)

    def test_zero_form(self, r2t):
        assert zero_form(r2t).is_zero()
        assert form_to_str(zero_form(r2t)) == "0 * dt"
