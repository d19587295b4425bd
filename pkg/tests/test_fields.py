"""Finite-field tower arithmetic: axioms, Frobenius, trace/norm, embeddings."""

import pytest
from hypothesis import given, strategies as st

from wittsym import make_field, field_of_order
from wittsym.errors import ConfigError, FieldMismatch, NotASubfield, NotPrime
from wittsym.fields import (
    absolute_trace_int,
    elem_to_str,
    embed,
    norm,
    parse_elem,
    prime_power_split,
    trace,
)


def elems(field):
    return st.integers(min_value=0, max_value=field.q - 1).map(field.elem_by_index)


class TestRingAxioms:
    """Exhaustive axioms on the small fields, sampled on the bigger ones."""

    @pytest.mark.parametrize("q", [(2, 1), (3, 1), (2, 2), (5, 1)])
    def test_exhaustive_field_axioms(self, q):
        p, k = q
        F = make_field(p, k)
        els = list(F.elements())
        assert len(els) == p**k
        for a in els:
            assert a + F.zero == a and a * F.one == a
            assert a - a == F.zero
            if a:
                assert a * a.inverse() == F.one
            for b in els:
                assert a + b == b + a and a * b == b * a
                for c in els:
                    assert (a + b) + c == a + (b + c)
                    assert (a * b) * c == a * (b * c)
                    assert a * (b + c) == a * b + a * c

    @given(st.data())
    def test_sampled_axioms_f8_f9(self, data):
        for (p, k) in [(2, 3), (3, 2)]:
            F = make_field(p, k)
            a = data.draw(elems(F))
            b = data.draw(elems(F))
            c = data.draw(elems(F))
            assert (a + b) + c == a + (b + c)
            assert a * (b + c) == a * b + a * c
            if a:
                assert a * a.inverse() == F.one

    def test_characteristic(self):
        for (p, k) in [(2, 2), (3, 2), (5, 1)]:
            F = make_field(p, k)
            acc = F.zero
            for _ in range(p):
                acc = acc + F.one
            assert acc == F.zero


class TestFrobeniusAndRoots:
    def test_frobenius_is_pth_power(self, f8, f9):
        for F in (f8, f9):
            for a in F.elements():
                assert a.frobenius() == a ** F.p
                assert a.frobenius(F.k) == a  # full orbit closes
                assert a.pth_root().frobenius() == a

    def test_frobenius_additive(self, f9):
        for a in f9.elements():
            for b in f9.elements():
                assert (a + b).frobenius() == a.frobenius() + b.frobenius()

    def test_multiplicative_generator_order(self):
        for (p, k) in [(2, 1), (2, 2), (3, 1), (3, 2), (2, 3)]:
            F = make_field(p, k)
            g = F.multiplicative_generator()
            seen = set()
            acc = F.one
            for _ in range(F.q - 1):
                acc = acc * g
                seen.add(acc.index)
            assert len(seen) == F.q - 1


class TestTraceNorm:
    def test_absolute_trace_range_and_additivity(self, f8, f9):
        for F in (f8, f9):
            for a in F.elements():
                assert 0 <= absolute_trace_int(a) < F.p
            for a in F.elements():
                for b in F.elements():
                    assert (
                        absolute_trace_int(a + b)
                        == (absolute_trace_int(a) + absolute_trace_int(b)) % F.p
                    )

    def test_absolute_trace_is_frobenius_orbit_sum(self, f9):
        # Independent recomputation: Tr(a) = a + a^p + ... + a^(p^(k-1)).
        for a in f9.elements():
            s = f9.zero
            cur = a
            for _ in range(f9.k):
                s = s + cur
                cur = cur.frobenius()
            assert s.in_prime_subfield()
            assert absolute_trace_int(a) == s.as_int()

    def test_relative_trace_transitive(self):
        F2, F4, F16 = make_field(2), make_field(2, 2), make_field(2, 4)
        for a in F16.elements():
            assert trace(trace(a, F4), F2) == trace(a, F2)

    def test_norm_multiplicative_and_transitive(self):
        F2, F4, F16 = make_field(2), make_field(2, 2), make_field(2, 4)
        for a in F16.elements():
            for b in list(F16.elements())[:6]:
                assert norm(a * b, F2) == norm(a, F2) * norm(b, F2)
            if a:
                assert norm(norm(a, F4), F2) == norm(a, F2)

    def test_trace_surjective(self, f4, f8, f9):
        for F in (f4, f8, f9):
            images = {absolute_trace_int(a) for a in F.elements()}
            assert images == set(range(F.p))


class TestEmbeddings:
    def test_embedding_is_ring_hom(self, f2, f4):
        e = embed(f2, f4)
        for a in f2.elements():
            for b in f2.elements():
                assert e(a + b) == e(a) + e(b)
                assert e(a * b) == e(a) * e(b)
        assert e(f2.one) == f4.one

    def test_tower_composition(self):
        F2, F4, F16 = make_field(2), make_field(2, 2), make_field(2, 4)
        lo, hi, thru = embed(F2, F16), embed(F4, F16), embed(F2, F4)
        for a in F2.elements():
            assert lo(a) == hi(thru(a))

    def test_section_inverts(self, f2, f8):
        e = embed(f2, f8)
        for a in f2.elements():
            assert e.section(e(a)) == a

    def test_not_a_subfield(self, f4, f8):
        # F_4 does not embed into F_8 (2 does not divide 3).
        with pytest.raises(NotASubfield):
            embed(f4, f8)

    def test_characteristic_mismatch(self, f2, f9):
        with pytest.raises((FieldMismatch, NotASubfield)):
            embed(f2, f9)


class TestConstructorsAndParsing:
    def test_prime_power_split(self):
        assert prime_power_split(2) == (2, 1)
        assert prime_power_split(8) == (2, 3)
        assert prime_power_split(9) == (3, 2)
        assert prime_power_split(125) == (5, 3)
        for bad in (1, 6, 12, 100):
            with pytest.raises(ConfigError):
                prime_power_split(bad)

    def test_field_of_order(self):
        assert field_of_order(9).q == 9
        assert field_of_order(8).p == 2 and field_of_order(8).k == 3

    def test_nonprime_characteristic_rejected(self):
        with pytest.raises(NotPrime):
            make_field(4)

    def test_parse_roundtrip(self, f2, f9):
        for F in (f2, f9):
            for a in F.elements():
                assert parse_elem(elem_to_str(a), F) == a

    def test_elem_index_roundtrip(self, f8):
        for i in range(f8.q):
            assert f8.elem_by_index(i).index == i
