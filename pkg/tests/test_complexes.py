"""Degree-truncated residue complex of the projective line and its homology."""

import pytest

from wittsym import (
    build_complex,
    make_field,
    teichmuller,
    verify_finite_theorem,
    witt_trace_invariant,
)
from wittsym.complexes import unit_invariant_witt


class TestDegreeZeroTerm:
    def test_rank_and_factors_q2_r1_d1(self):
        kc = build_complex(2, 1, 1)
        assert kc.place_labels() == ("(t)", "(t+1)", "inf")
        assert kc.deg0_rank == 3
        assert kc.deg0_invariant_factors() == (2, 2, 2)
        assert kc.modulus == 2

    def test_rank_q2_r1_d2(self):
        kc = build_complex(2, 1, 2)
        assert kc.deg0_rank == 4  # one degree-2 place joins the window
        assert "(t^2+t+1)" in kc.place_labels()

    def test_truncation_two_factors(self):
        kc = build_complex(2, 2, 1)
        assert kc.deg0_invariant_factors() == (4, 4, 4)
        assert kc.modulus == 4


class TestPoolColumns:
    def test_every_column_sums_to_zero(self):
        # corestriction after the residue map is zero: each pool column,
        # read in trace coordinates, has coordinate sum 0 mod p^r.
        for (q, r, D) in [(2, 1, 2), (2, 2, 2), (3, 1, 1)]:
            kc = build_complex(q, r, D)
            assert kc.pool
            for col in kc.pool:
                assert kc.pushforward_total(col.values) == 0

    def test_column_labels_unique(self):
        kc = build_complex(2, 2, 2)
        labels = [col.label for col in kc.pool]
        assert len(labels) == len(set(labels))

    def test_census_q2_r2_d2(self):
        # at truncation 2 most direct symbols have wild slots and are skipped;
        # the corestricted columns from the quadratic constant extension fill
        # the odd part at the degree-2 place.
        kc = build_complex(2, 2, 2)
        c = kc.census
        assert c["wild_skipped"] > 0
        assert c["corestricted_considered"] > 0
        assert len(kc.pool) == c["direct_considered"] - c["wild_skipped"] - c[
            "zero_columns"] + c["corestricted_considered"]
        kinds = {col.kind for col in kc.pool}
        assert kinds == {"direct", "corestricted"}

    def test_no_wild_skips_at_r1(self):
        kc = build_complex(2, 1, 2)
        assert kc.census["wild_skipped"] == 0


class TestHomology:
    def test_kh0_orders(self):
        assert build_complex(2, 1, 2).kh0().order() == 2
        assert build_complex(3, 1, 1).kh0().order() == 3
        assert build_complex(4, 1, 1).kh0().order() == 2

    def test_kh0_cyclic_of_order_four_at_truncation_two(self):
        # the interesting case: order 4 and cyclic, not (Z/2)^2
        kh = build_complex(2, 2, 2).kh0()
        assert kh.order() == 4
        assert kh.invariant_factors() == (4,)

    def test_pool_columns_are_zero_classes(self):
        kc = build_complex(2, 2, 2)
        kh = kc.kh0()
        for col in kc.pool[:10]:
            assert kh.is_zero_class(col.values)

    def test_rational_places_identified(self):
        for (q, r, D) in [(2, 1, 2), (2, 2, 2), (3, 1, 1)]:
            assert build_complex(q, r, D).rational_places_identified()


class TestUnitInvariantWitness:
    def test_prime_fields_use_teichmuller_one(self, f2, f3):
        for F in (f2, f3):
            for r in (1, 2):
                u = unit_invariant_witt(F, r)
                assert u.entries == teichmuller(F.one, r).entries

    def test_invariant_is_a_unit(self, f4, f8, f9):
        for F in (f4, f8, f9):
            u = unit_invariant_witt(F, 1)
            assert witt_trace_invariant(u) % F.p != 0

    def test_f4_needs_a_nontrivial_witness(self, f4):
        # over F_4 the trace of 1 vanishes, so the witness cannot be [1]
        u = unit_invariant_witt(f4, 1)
        assert u.entries != teichmuller(f4.one, 1).entries
        assert witt_trace_invariant(teichmuller(f4.one, 1)) == 0


class TestVerifyReport:
    @pytest.mark.parametrize("q,r,D", [(2, 1, 2), (3, 1, 1), (4, 1, 1)])
    def test_all_assertions_pass(self, q, r, D):
        report = verify_finite_theorem(q, r, D)
        p = make_field(*((q, 1) if q in (2, 3) else (2, 2))).p
        assert report["schema"] == "kato-symbol/1"
        assert set(report.keys()) == {
            "schema", "params", "deg0_rank", "pool_size", "checks", "kh0", "f_star"
        }
        assert [c["name"] for c in report["checks"]] == [
            "cor-after-residue-zero",
            "pushforward-surjective",
            "cor-kernel-inside-residue-image",
            "kh0-order-p^r",
        ]
        assert all(c["pass"] for c in report["checks"])
        assert report["kh0"]["order"] == p**r
        assert report["f_star"]["surjective"] is True
        assert report["f_star"]["kernel_dim_at_truncation"] == 0

    def test_params_echoed(self):
        report = verify_finite_theorem(2, 2, 2)
        assert report["params"] == {
            "q": 2, "p": 2, "r": 2, "D": 2, "symbol_bound": 1
        }
        assert report["kh0"] == {"order": 4, "invariant_factors": [4]}
