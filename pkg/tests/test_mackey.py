"""Mackey product of Witt vectors with units: vanishing, projection formula."""

import pytest

from wittsym import (
    WittVector,
    extended_symbol,
    mackey_group,
    make_field,
    make_ratfunc_field,
    parse_mackey,
    teichmuller,
    witt_trace,
)
from wittsym.errors import NoPreimage, NotASubfield
from wittsym.fields import embed, norm, trace
from wittsym.mackey import (
    FieldLattice,
    extended_symbol_invariants,
    mackey_to_str,
    norm_solve,
    pf_instances,
    pf_rewrite,
    trace_solve,
    transfer,
    restriction,
    transfer_surjectivity_check,
    witt_trace_solve,
)


class TestFieldLattice:
    def test_finite_lattice_members(self, f2):
        lat = FieldLattice(f2, 3)
        assert lat.degrees() == (1, 2, 3)
        assert lat.member(1) is f2
        assert lat.member(2).q == 4
        assert lat.member(3).q == 8

    def test_function_field_lattice_members(self, r2t):
        lat = FieldLattice(r2t, 2)
        assert lat.member(1) is r2t
        assert lat.member(2).base.q == 4

    def test_lift_is_tower_compatible(self, f2):
        lat = FieldLattice(f2, 2)
        e = embed(f2, lat.member(2))
        for a in f2.elements():
            assert lat.lift(a, 1, 2) == e(a)


class TestVanishing:
    @pytest.mark.parametrize("q,r,n", [(2, 1, 1), (2, 2, 1), (3, 1, 1), (2, 1, 2)])
    def test_group_is_trivial(self, q, r, n):
        lat = FieldLattice(make_field(q), 3)
        g = mackey_group(lat, n, r)
        assert g.order() == 1

    def test_trivial_with_wp_quotient_rows(self, f2):
        lat = FieldLattice(f2, 3)
        assert mackey_group(lat, 1, 2, wp_quotient=True).order() == 1

    def test_every_symbol_is_a_zero_class(self, f4):
        lat = FieldLattice(make_field(2), 2)
        g = mackey_group(lat, 1, 1)
        s = parse_mackey("{(1); 1}_{F_4/F_2}", lat, 1)
        assert g.is_zero_class(s)


class TestSolvers:
    def test_trace_solve_every_target(self):
        for (pd, pu) in [((2, 1), (2, 2)), ((3, 1), (3, 2))]:
            Fd, Fu = make_field(*pd), make_field(*pu)
            for target in Fd.elements():
                x = trace_solve(Fd, Fu, target)
                assert trace(x, Fd) == target

    def test_norm_solve_every_unit_target(self):
        for (pd, pu) in [((2, 1), (2, 2)), ((3, 1), (3, 2))]:
            Fd, Fu = make_field(*pd), make_field(*pu)
            for target in Fd.elements():
                if not target:
                    continue
                y = norm_solve(Fd, Fu, target)
                assert norm(y, Fd) == target

    def test_witt_trace_solve_every_target(self):
        Fd, Fu = make_field(2), make_field(2, 2)
        e = embed(Fd, Fu)
        for a0 in Fd.elements():
            for a1 in Fd.elements():
                target = WittVector(Fd, (a0, a1))
                z = witt_trace_solve(Fd, Fu, target)
                got = witt_trace(z, 1)
                assert got.entries == tuple(e(c) for c in target.entries)


class TestProjectionFormula:
    def test_rewrite_down_descends_the_witt_trace(self, f2):
        lat = FieldLattice(f2, 2)
        ms = parse_mackey("{(1; 0); 1}_{F_4/F_2}", lat, 2)
        dn = pf_rewrite(ms, "down", (1, 2))
        assert dn.level == 1
        e = embed(f2, lat.member(2))
        lifted = WittVector(lat.member(2), tuple(e(c) for c in dn.a.entries))
        assert witt_trace(ms.a, 1).entries == lifted.entries

    def test_rewrite_up_produces_a_trace_certificate(self, f2):
        lat = FieldLattice(f2, 2)
        ms = parse_mackey("{(1; 0); 1}_{F_4/F_2}", lat, 2)
        dn = pf_rewrite(ms, "down", (1, 2))
        up = pf_rewrite(dn, "up", (1, 2))
        assert up.level == 2
        e = embed(f2, lat.member(2))
        lifted = WittVector(lat.member(2), tuple(e(c) for c in dn.a.entries))
        assert witt_trace(up.a, 1).entries == lifted.entries

    def test_rewrite_rejects_non_towers(self, f2):
        lat = FieldLattice(f2, 3)
        ms = parse_mackey("{(1); 1}_{F_4/F_2}", lat, 1)
        with pytest.raises(NotASubfield):
            pf_rewrite(ms, "up", (2, 3))

    def test_function_field_lattice_needs_instance_route(self, r2t):
        lat = FieldLattice(r2t, 2)
        ms = parse_mackey("{(1); t}_{F_2(t)/F_2(t)}", lat, 1)
        with pytest.raises(NoPreimage):
            pf_rewrite(ms, "up", (1, 2))

    @pytest.mark.parametrize("r", [1, 2])
    def test_instances_have_matching_extended_invariants(self, r2t, r):
        lat = FieldLattice(r2t, 2)
        insts = pf_instances(lat, 1, r, max_pool=60)
        assert insts
        for kind, low, high, s_low, s_high in insts:
            ivl = extended_symbol_invariants(s_low, r2t)
            ivh = extended_symbol_invariants(s_high, r2t)
            assert ivl.to_json_dict() == ivh.to_json_dict(), kind


class TestTransferRestriction:
    def test_cor_after_res_multiplies_by_degree(self, r2t):
        lat = FieldLattice(r2t, 2)
        ms = parse_mackey("{(1; 0); t+1}_{F_2(t)/F_2(t)}", lat, 2)
        base_iv = extended_symbol_invariants(ms, r2t)
        parts = restriction(ms, 2)
        total = None
        for part in parts:
            iv = extended_symbol_invariants(part, r2t)
            total = iv if total is None else total + iv
        assert total.to_json_dict() == (base_iv + base_iv).to_json_dict()

    def test_transfer_relabels_without_moving_invariants(self, r2t):
        lat = FieldLattice(r2t, 2)
        ms = parse_mackey("{(1; 0); t+1}_{F_2(t)/F_2(t)}", lat, 2)
        part = restriction(ms, 2)[0]
        tr = transfer(part, 1)
        assert tr.lower == 1 and tr.level == part.level
        assert extended_symbol_invariants(tr, r2t).to_json_dict() == \
            extended_symbol_invariants(part, r2t).to_json_dict()

    def test_transfer_surjectivity(self, f2):
        lat = FieldLattice(f2, 2)
        assert transfer_surjectivity_check(lat, 1, 2, 1, 1)


class TestExtendedSymbol:
    def test_total_invariant_vanishes(self, r2t):
        lat = FieldLattice(r2t, 2)
        for text, r in [
            ("{(1); t}_{F_2(t)/F_2(t)}", 1),
            ("{(1; 0); t+1}_{F_2(t)/F_2(t)}", 2),
            ("{(1); t}_{F_4(t)/F_2(t)}", 1),
        ]:
            ms = parse_mackey(text, lat, r)
            assert extended_symbol_invariants(ms, r2t).total() == 0

    def test_extended_symbol_emits_terms(self, r2t):
        lat = FieldLattice(r2t, 2)
        ms = parse_mackey("{(1); t}_{F_2(t)/F_2(t)}", lat, 1)
        terms = extended_symbol(ms)
        assert len(terms) >= 1


class TestParsing:
    def test_roundtrip(self, f2, r2t):
        flat = FieldLattice(f2, 2)
        rlat = FieldLattice(r2t, 2)
        for text, lat, r in [
            ("{(1; 0); 1}_{F_4/F_2}", flat, 2),
            ("{(1); t}_{F_2(t)/F_2(t)}", rlat, 1),
            ("{(1); t+1}_{F_4(t)/F_2(t)}", rlat, 1),
        ]:
            ms = parse_mackey(text, lat, r)
            out = mackey_to_str(ms)
            again = parse_mackey(out, lat, r)
            assert mackey_to_str(again) == out
