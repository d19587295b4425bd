"""Howell-form linear algebra over Z/p^r against brute-force span oracles."""

import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wittsym.errors import NoPreimage
from wittsym.linalg import (
    GroupPresentation,
    HowellBasis,
    local_smith_exponents,
    pval,
    solve_in_span,
)


def _brute_span(rows, m, ncols):
    """Every Z/m-combination of the rows, as a set of tuples."""
    out = {tuple([0] * ncols)}
    frontier = [tuple([0] * ncols)]
    rows = [tuple(int(x) % m for x in row) for row in rows]
    while frontier:
        cur = frontier.pop()
        for row in rows:
            nxt = tuple((a + b) % m for a, b in zip(cur, row))
            if nxt not in out:
                out.add(nxt)
                frontier.append(nxt)
    return out


def _random_rows(rng, nrows, ncols, m):
    return [[rng.randrange(m) for _ in range(ncols)] for _ in range(nrows)]


SMALL_CASES = [(2, 1), (2, 2), (3, 1), (2, 3), (3, 2)]


class TestPval:
    def test_known_values(self):
        assert pval(0, 2, 3) == 3
        assert pval(4, 2, 3) == 2
        assert pval(6, 2, 3) == 1
        assert pval(5, 2, 3) == 0
        assert pval(9, 3, 2) == 2


class TestHowellBasis:
    @pytest.mark.parametrize("p,r", SMALL_CASES)
    def test_span_membership_matches_brute_force(self, p, r):
        rng = random.Random(100 * p + r)
        m = p**r
        for trial in range(12):
            ncols = rng.randrange(1, 4)
            rows = _random_rows(rng, rng.randrange(0, 4), ncols, m)
            basis = HowellBasis(ncols, p, r)
            basis.add_rows(rows)
            span = _brute_span(rows, m, ncols)
            assert basis.span_order() == len(span)
            assert basis.quotient_order() == m**ncols // len(span)
            # membership agrees with the enumerated span on every vector
            for vec in itertools.product(range(m), repeat=ncols):
                assert basis.contains(vec) == (vec in span)

    @pytest.mark.parametrize("p,r", [(2, 2), (3, 2)])
    def test_reduce_is_canonical_coset_labeling(self, p, r):
        rng = random.Random(7 * p + r)
        m = p**r
        ncols = 3
        rows = _random_rows(rng, 2, ncols, m)
        basis = HowellBasis(ncols, p, r)
        basis.add_rows(rows)
        basis.canonicalize()
        span = _brute_span(rows, m, ncols)
        reps = {}
        for vec in itertools.product(range(m), repeat=ncols):
            red = tuple(int(x) for x in basis.reduce(vec))
            # the representative differs from vec by a span element
            diff = tuple((a - b) % m for a, b in zip(vec, red))
            assert diff in span
            # idempotent
            assert tuple(int(x) for x in basis.reduce(red)) == red
            coset = tuple(sorted(tuple((a + s) % m for a, s in zip(vec, sp))
                                 for sp in span))
            if coset in reps:
                assert reps[coset] == red  # one label per coset
            else:
                reps[coset] = red
        assert len(reps) == basis.quotient_order()

    def test_incremental_equals_batch(self):
        rng = random.Random(9)
        m, p, r, ncols = 8, 2, 3, 4
        rows = _random_rows(rng, 5, ncols, m)
        one = HowellBasis(ncols, p, r)
        one.add_rows(rows)
        two = HowellBasis(ncols, p, r)
        for row in reversed(rows):
            two.add_row(row)
        assert one.span_order() == two.span_order()
        for vec in _random_rows(rng, 20, ncols, m):
            assert one.contains(vec) == two.contains(vec)

    def test_solve_in_span_recombines(self):
        rng = random.Random(17)
        p, r, ncols, nrows = 2, 2, 3, 3
        m = p**r
        rows = _random_rows(rng, nrows, ncols, m)
        basis = HowellBasis(ncols, p, r, track=nrows)
        for i, row in enumerate(rows):
            tracked = list(row) + [0] * nrows
            tracked[ncols + i] = 1
            basis.add_row(tracked)
        for _ in range(20):
            coeffs = [rng.randrange(m) for _ in range(nrows)]
            vec = [sum(c * row[j] for c, row in zip(coeffs, rows)) % m
                   for j in range(ncols)]
            sol = solve_in_span(basis, vec)
            rebuilt = [sum(c * row[j] for c, row in zip(sol, rows)) % m
                       for j in range(ncols)]
            assert rebuilt == vec
        # something outside the span raises
        span = _brute_span(rows, m, ncols)
        outside = next(
            (v for v in itertools.product(range(m), repeat=ncols) if v not in span),
            None,
        )
        if outside is not None:
            with pytest.raises(NoPreimage):
                solve_in_span(basis, outside)


class TestSmithExponents:
    @given(st.integers(0, 10**6))
    def test_exponents_reproduce_span_order(self, seed):
        rng = random.Random(seed)
        p, r = rng.choice(SMALL_CASES)
        m = p**r
        ncols = rng.randrange(1, 4)
        rows = _random_rows(rng, rng.randrange(1, 4), ncols, m)
        exps = local_smith_exponents(rows, p, r)
        basis = HowellBasis(ncols, p, r)
        basis.add_rows(rows)
        from_snf = 1
        for e in exps:
            from_snf *= m // p**e
        assert from_snf == basis.span_order()
        assert exps == sorted(exps)
        assert all(0 <= e < r for e in exps)

    def test_known_diagonal(self):
        # diag(1, 2, 4) over Z/8
        exps = local_smith_exponents([[1, 0, 0], [0, 2, 0], [0, 0, 4]], 2, 3)
        assert exps == [0, 1, 2]


class TestGroupPresentation:
    def test_free_group(self):
        g = GroupPresentation(2, 2, ["a", "b"])
        assert g.order() == 16
        assert g.invariant_factors() == (4, 4)
        assert not g.is_zero_class(g.unit_vector("a"))
        assert g.class_order(g.unit_vector("a")) == 4

    def test_quotient_orders_match_brute_force(self):
        rng = random.Random(23)
        for p, r in [(2, 1), (2, 2), (3, 1)]:
            m = p**r
            labels = ["x", "y", "z"]
            for _ in range(8):
                rows = _random_rows(rng, 2, 3, m)
                g = GroupPresentation(p, r, labels)
                for row in rows:
                    g.add_relation(row)
                span = _brute_span(rows, m, 3)
                assert g.order() == m**3 // len(span)
                prod = 1
                for f in g.invariant_factors():
                    prod *= f
                assert prod == g.order()
                # relation rows are zero classes; their cosets reduce to zero
                for row in rows:
                    assert g.is_zero_class(row)

    def test_relation_dict_and_sparse(self):
        g = GroupPresentation(2, 2, ["a", "b", "c"])
        g.add_relation_dict({"a": 1, "c": 3})
        h = GroupPresentation(2, 2, ["a", "b", "c"])
        h.add_relation_sparse({0: 1, 2: 3})
        assert g.order() == h.order()
        assert g.is_zero_class(h.unit_vector("a") + 3 * h.unit_vector("c"))

    def test_class_arithmetic(self):
        g = GroupPresentation(2, 2, ["a", "b"])
        g.add_relation([2, 0])  # a has order 2 now
        assert g.order() == 8
        assert g.invariant_factors() == (2, 4)  # ascending divisibility chain
        assert g.class_order(g.unit_vector("a")) == 2
        red = g.reduce_class([3, 5])
        assert g.is_zero_class(np.asarray([3, 5]) - red)

    def test_duplicate_labels_rejected(self):
        with pytest.raises(Exception):
            GroupPresentation(2, 1, ["a", "a"])

    def test_json_shape(self):
        g = GroupPresentation(2, 1, ["a", "b"])
        g.add_relation([1, 1])
        d = g.to_json_dict()
        assert d["order"] == 2
        assert list(d["invariant_factors"]) == [2]
