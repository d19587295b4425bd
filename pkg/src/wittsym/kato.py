"""Symbol presentation of the cyclic-algebra cohomology groups H^{n+1} with
p^r coefficients, their residues at places of F_q(t), local invariants, and
corestriction along constant-field extensions.

A symbol couples a truncated Witt vector with n multiplicative entries.
The group is the quotient of the span of such symbols by: additivity in
every slot, the repeated-entry relation, the relation degrading a
single-coordinate Witt slot against an equal multiplicative entry, and the
image of Frobenius-minus-identity in the Witt slot.

Residues: where every Witt entry is regular at a place the tame formula
v(b) * [reduction of a] applies at any r; where some entry has a pole the
r = 1 local invariant is the trace of the residue of a*dlog(b) (the
classical local-symbol formula), and r > 1 wild configurations are
rejected rather than approximated.

The identification of the residue target with Z/p^r is the Witt-vector
trace down to the prime field.  The class of the Teichmueller lift of 1
generates that target whenever p does not divide the residue degree, but
the trace normalization is the one that stays an isomorphism in every
degree, so all invariants are reported through it.
"""

from __future__ import annotations

import itertools
import random as _random
from dataclasses import dataclass

import numpy as np

from .errors import (FieldMismatch, LengthMismatch, NotConstantExtension, ParseError,
                     TooLarge, WildAtPlace, ZeroEntry)
from .fields import FqElem, FqField, absolute_trace_int, elem_to_str, embed
from .funcfield import (Place, RatFunc, RatFuncField, factor_poly, irreducible_polys,
                        make_ratfunc_field, parse_ratfunc, place_to_str, places_of_support,
                        ratfunc_to_str, residue_class, residue_of_form, valuation)
from .linalg import GroupPresentation
from .milnor import MilnorSymbol, tame_symbol
from .witt import (WittVector, coker_wp, parse_witt, v_teichmuller, witt_to_str,
                   witt_trace_invariant, wp)


class KatoSymbol:
    """One symbol term: integer coefficient, Witt slot, n multiplicative slots."""

    __slots__ = ("ring", "r", "n", "a", "bs", "coeff")

    def __init__(self, a, bs, coeff=1):
        bs = tuple(bs)
        for b in bs:
            if not b:
                raise ZeroEntry("multiplicative entries must be nonzero")
            ring = b.field if isinstance(b, (FqElem, RatFunc)) else None
            if ring is not a.ring:
                raise FieldMismatch("Witt slot and multiplicative slots over different fields")
        self.ring = a.ring
        self.r = a.r
        self.n = len(bs)
        self.a = a
        self.bs = bs
        self.coeff = coeff

    def scale(self, c):
        return KatoSymbol(self.a, self.bs, self.coeff * c)

    def __neg__(self):
        return self.scale(-1)

    def __repr__(self):
        return kato_to_str(self)


def as_expr(s):
    """Normalize a symbol or iterable of symbols to a tuple of terms."""
    if isinstance(s, KatoSymbol):
        return (s,)
    return tuple(s)


# ---------------------------------------------------------------------------
# residues
# ---------------------------------------------------------------------------

def _entry_regular_at(f, place):
    return f.is_zero() or valuation(f, place) >= 0


def witt_regular_at(a, place):
    return all(_entry_regular_at(e, place) for e in a.entries)


def witt_reduce_at(a, place):
    """Coordinatewise reduction of a regular Witt vector at a place."""
    res_field = place.residue_data()[0]
    entries = []
    for e in a.entries:
        if e.is_zero():
            entries.append(res_field.zero)
        else:
            entries.append(residue_class(e, place))
    return WittVector(res_field, entries)


def residue_tame(s, place):
    """Tame residue of weight-1 terms at a place: sum of coeff * v(b) *
    [reduction of a], a Witt vector over the residue field (understood as a
    class modulo Frobenius-minus-identity)."""
    terms = as_expr(s)
    res_field = place.residue_data()[0]
    out = None
    for t in terms:
        if t.n != 1:
            raise LengthMismatch("tame residue implemented for one multiplicative slot")
        if not witt_regular_at(t.a, place):
            raise WildAtPlace(f"Witt slot has a pole at {place_to_str(place)}")
        m = valuation(t.bs[0], place)
        contrib = witt_reduce_at(t.a, place).int_mul(m * t.coeff)
        out = contrib if out is None else out + contrib
    if out is None:
        raise ValueError("empty symbol sum")
    return out


def residue_schmid(s, place, precision=None):
    """r = 1 local invariant: trace to F_p of the residue of a*dlog(b),
    valid tame or wild.  Residues of rational forms are computed exactly,
    so the optional precision is only a floor for the expansion length."""
    terms = as_expr(s)
    total = 0
    p = None
    for t in terms:
        if t.r != 1 or t.n != 1:
            raise LengthMismatch("the local-symbol formula needs r = 1, one slot")
        p = t.ring.p
        form = t.a.entries[0] * t.bs[0].dlog_func()
        res = residue_of_form(form, place, min_terms=precision)
        total += t.coeff * absolute_trace_int(res)
    return total % p


TAME = "tame"
WILD_SCHMID = "wild-schmid"


@dataclass(frozen=True)
class InvariantVector:
    """Finitely supported place -> Z/p^r map of local invariants, in
    Witt-trace coordinates."""
    modulus: int
    entries: tuple  # sorted tuple of (Place, int), zeros dropped

    @staticmethod
    def build(modulus, mapping):
        items = tuple(sorted(((v, c % modulus) for v, c in mapping.items() if c % modulus),
                             key=lambda it: it[0].sort_key()))
        return InvariantVector(modulus, items)

    def value_at(self, place):
        for v, c in self.entries:
            if v is place:
                return c
        return 0

    def total(self):
        return sum(c for _, c in self.entries) % self.modulus

    def is_zero(self):
        return not self.entries

    def support(self):
        return tuple(v for v, _ in self.entries)

    def to_json_dict(self):
        return {place_to_str(v): c for v, c in self.entries}

    def __add__(self, other):
        if other.modulus != self.modulus:
            raise LengthMismatch("invariant vectors with different moduli")
        acc = {v: c for v, c in self.entries}
        for v, c in other.entries:
            acc[v] = acc.get(v, 0) + c
        return InvariantVector.build(self.modulus, acc)


def symbol_support(s):
    """All places where a residue can be nonzero: zeros and poles of every
    multiplicative entry, poles of every Witt entry, and infinity."""
    terms = as_expr(s)
    rff = terms[0].ring
    support = {Place.infinite(rff)}
    for t in terms:
        for b in t.bs:
            support.update(places_of_support(b))
        for e in t.a.entries:
            if not e.is_zero() and e.den.degree() >= 1:
                _, facs = factor_poly(e.den)
                for pi, _m in facs:
                    support.add(Place.finite(rff, pi))
    return sorted(support, key=lambda v: v.sort_key())


def invariant_vector(s, classify=False):
    """Local invariants of a weight-1 symbol sum over F_q(t).

    Tame places use the valuation formula at any r; r = 1 falls back to the
    exact local-symbol residue at wild places; r > 1 wild raises."""
    terms = as_expr(s)
    rff = terms[0].ring
    if not isinstance(rff, RatFuncField):
        raise FieldMismatch("invariant vectors are for symbols over F_q(t)")
    r = terms[0].r
    modulus = rff.p ** r
    out = {}
    kinds = {}
    for v in symbol_support(terms):
        tame_terms = [t for t in terms if witt_regular_at(t.a, v)]
        wild_terms = [t for t in terms if not witt_regular_at(t.a, v)]
        val = 0
        if tame_terms:
            val += witt_trace_invariant(residue_tame(tame_terms, v))
        if wild_terms:
            if r > 1:
                raise WildAtPlace(
                    f"Witt slot has a pole at {place_to_str(v)} and r > 1 has no implemented"
                    " wild residue")
            val += residue_schmid(wild_terms, v)
            kinds[v] = WILD_SCHMID
        else:
            kinds.setdefault(v, TAME)
        if val % modulus:
            out[v] = val % modulus
    iv = InvariantVector.build(modulus, out)
    if classify:
        return iv, kinds
    return iv


def hbn_sum(s):
    """The global reciprocity sum of the local invariants, in Z/p^r."""
    return invariant_vector(s).total()


# ---------------------------------------------------------------------------
# relation instances
# ---------------------------------------------------------------------------

def relation_instances(witt_pool, unit_pool, n, r):
    """All computable defining-relation instances over the given pools.

    Returns a list of (kind, expr) pairs:
      kind "repeat":   <a | b, b>                     (n = 2)
      kind "slot":     <single-coordinate a | a, ...> (the Witt entry equals
                       the first multiplicative entry; every coordinate
                       position is instantiated)
      kind "wp-image": <wp(a) | b, ...>
    """
    out = []
    witt_pool = list(witt_pool)
    unit_pool = list(unit_pool)
    if n == 2:
        for a in witt_pool:
            for b in unit_pool:
                out.append(("repeat", (KatoSymbol(a, (b, b)),)))
    if n >= 1:
        rest = tuple(unit_pool[:n - 1])
        if len(rest) == n - 1:
            for u in unit_pool:
                for j in range(r):
                    a = v_teichmuller(u, j, r)
                    out.append(("slot", (KatoSymbol(a, (u,) + rest),)))
        for a in witt_pool:
            for b in unit_pool:
                out.append(("wp-image", (KatoSymbol(wp(a), (b,) * n),)))
    return out


def residue_weight2(s, place):
    """Residue of weight-2 terms at a place with regular Witt slots: the
    weight-1 symbol over the residue field pairing the reduced Witt slot
    with the Milnor tame symbol of the multiplicative pair.  Returns a
    tuple of weight-1 terms over the residue field (empty when zero)."""
    terms = as_expr(s)
    out = []
    for t in terms:
        if t.n != 2:
            raise LengthMismatch("weight-2 residue needs two multiplicative slots")
        if not witt_regular_at(t.a, place):
            raise WildAtPlace(f"Witt slot has a pole at {place_to_str(place)}")
        u = tame_symbol(MilnorSymbol.of(t.bs, t.coeff), place)
        if u == u.field.one:
            continue
        out.append(KatoSymbol(witt_reduce_at(t.a, place), (u,)))
    return tuple(out)


def weight2_residues_vanish(s):
    """Check that every residue of a weight-2 symbol sum dies in the
    truncated presentation over its (finite) residue field."""
    terms = as_expr(s)
    for v in symbol_support(terms):
        res = residue_weight2(terms, v)
        if not res:
            continue
        trunc = _finite_truncation(res[0].ring, 1, res[0].r)
        if not trunc.presentation.is_zero_class(trunc.class_coords_finite(res)):
            return False
    return True


_FIN_TRUNC_CACHE = {}


def _finite_truncation(field, n, r):
    key = (id(field), n, r)
    got = _FIN_TRUNC_CACHE.get(key)
    if got is None:
        got = HGroupTruncation(field, n, r)
        _FIN_TRUNC_CACHE[key] = got
    return got


# ---------------------------------------------------------------------------
# corestriction along constant-field extensions
# ---------------------------------------------------------------------------

def _is_base_rational(f, section):
    return all(section(c) is not None for c in f.num.coeffs + f.den.coeffs)


def _descend_ratfunc(f, section, base_rff):
    return f.map_coeffs(lambda c: section(c), base_rff)


def constant_extension_data(ext_rff, base_rff):
    if ext_rff.p != base_rff.p:
        raise NotConstantExtension("different characteristics")
    kE, kF = ext_rff.base.k, base_rff.base.k
    if kE % kF:
        raise NotConstantExtension("constant fields are not nested")
    m = kE // kF
    emb = embed(base_rff.base, ext_rff.base)
    return m, emb


def frobenius_conjugate(s, base_rff, i=1):
    """Apply the i-th power of the constant-field Frobenius over the base to
    every coefficient of every slot."""
    constant_extension_data(s.ring, base_rff)
    kF = base_rff.base.k
    a2 = s.a.map_entries(lambda e: e.frobenius_coeffs(kF * i))
    bs2 = tuple(b.frobenius_coeffs(kF * i) for b in s.bs)
    return KatoSymbol(a2, bs2, s.coeff)


class CorestrictionResult:
    """Corestriction of symbol terms along F_{q^m}(t) / F_q(t).

    When a projection-formula shape applies the result is expressed by
    symbols over the base; otherwise the Galois-conjugate sum is retained
    over the extension and only the pushed-down invariant vector is
    canonical.  invariant_vector() reports base-field local invariants:
    the value at a base place is the sum of the invariants of the
    *original* extension terms at the places above it.  (The conjugate
    sum is the restriction of the corestriction back up the tower, which
    overcounts local invariants by the extension degree.)"""

    def __init__(self, base_rff, ext_rff, src_terms, e_terms, f_terms):
        self.base = base_rff
        self.ext = ext_rff
        self.src_terms = tuple(src_terms)
        self.e_terms = tuple(e_terms)
        self.f_terms = tuple(f_terms) if f_terms is not None else None

    @property
    def descended(self):
        return self.f_terms is not None

    def invariant_vector(self):
        src = self.src_terms
        r = src[0].r
        modulus = self.base.p ** r
        acc = {}
        iv_up = invariant_vector(src)
        for w, c in iv_up.entries:
            v = place_below(w, self.base)
            acc[v] = acc.get(v, 0) + c
        return InvariantVector.build(modulus, acc)


def place_below(w, base_rff):
    """The base place under a place of a constant-field extension."""
    ext_rff = w.rff
    if ext_rff is base_rff:
        return w
    m, emb = constant_extension_data(ext_rff, base_rff)
    if w.poly is None:
        return Place.infinite(base_rff)
    kF = base_rff.base.k
    prod = None
    for i in range(m):
        conj = w.poly.frobenius_coeffs(kF * i)
        prod = conj if prod is None else prod * conj
    down = prod.map_coeffs(lambda c: emb.section(c), base_rff.base)
    _, facs = factor_poly(down)
    if len(facs) != 1:  # pragma: no cover - norm of an irreducible
        raise NotConstantExtension("conjugate product failed to stay irreducible")
    return Place.finite(base_rff, facs[0][0])


def corestriction_const(s, base_rff):
    """Galois-sum corestriction of symbols over a constant-field extension.

    Recognized projection-formula shapes produce base-field symbols:
    every slot base-rational gives m * s; base-rational multiplicative
    slots give the Witt-trace in the Witt slot; a base-rational Witt slot
    with one multiplicative slot gives the norm there."""
    terms = as_expr(s)
    ext_rff = terms[0].ring
    m, emb = constant_extension_data(ext_rff, base_rff)
    if ext_rff is base_rff:
        return CorestrictionResult(base_rff, ext_rff, terms, terms, terms)
    section = emb.section
    f_terms = []
    e_terms = []
    all_shapes = True
    for t in terms:
        conjugates = [frobenius_conjugate(t, base_rff, i) for i in range(m)]
        e_terms.extend(conjugates)
        a_rat = all(_is_base_rational(e, section) for e in t.a.entries)
        bs_rat = all(_is_base_rational(b, section) for b in t.bs)
        if a_rat and bs_rat:
            a_dn = t.a.map_entries(lambda e: _descend_ratfunc(e, section, base_rff), base_rff)
            bs_dn = tuple(_descend_ratfunc(b, section, base_rff) for b in t.bs)
            f_terms.append(KatoSymbol(a_dn, bs_dn, t.coeff * m))
        elif bs_rat:
            tr = None
            for c in conjugates:
                tr = c.a if tr is None else tr + c.a
            a_dn = tr.map_entries(lambda e: _descend_ratfunc(e, section, base_rff), base_rff)
            bs_dn = tuple(_descend_ratfunc(b, section, base_rff) for b in t.bs)
            f_terms.append(KatoSymbol(a_dn, bs_dn, t.coeff))
        elif a_rat and t.n == 1:
            nm = None
            for c in conjugates:
                nm = c.bs[0] if nm is None else nm * c.bs[0]
            a_dn = t.a.map_entries(lambda e: _descend_ratfunc(e, section, base_rff), base_rff)
            b_dn = _descend_ratfunc(nm, section, base_rff)
            f_terms.append(KatoSymbol(a_dn, (b_dn,), t.coeff))
        else:
            all_shapes = False
    return CorestrictionResult(base_rff, ext_rff, terms, e_terms,
                               f_terms if all_shapes else None)


# ---------------------------------------------------------------------------
# truncated presentations
# ---------------------------------------------------------------------------

class HGroupTruncation:
    """Bounded generators-and-relations model of H^{n+1}_{p^r}.

    Over a finite field the coordinates are exact: the Witt slot is a free
    Z/p^r-module on the Teichmueller lifts of a polynomial basis and each
    multiplicative slot is cyclic of order q - 1, so the tensor span
    carries the presentation and the defining relations can only shrink it
    further (n = 0 keeps the Frobenius-minus-identity rows and reproduces
    the Artin-Schreier-Witt cokernel; n >= 1 collapses since
    gcd(p^r, q - 1) = 1).

    Over F_q(t) the generators are (Witt-slot, multiplicative-atom) pairs
    from bounded pools with every relation instance that stays inside the
    pool; computed orders over-approximate the group, shrink as bounds
    grow, and a computed zero is a true zero."""

    def __init__(self, ring, n, r, D=2, a_degree=1):
        self.ring = ring
        self.n = n
        self.r = r
        self.census = {}
        if isinstance(ring, FqField):
            self._init_finite(ring, n, r)
        else:
            self._init_ratfunc(ring, n, r, D, a_degree)

    # -- finite field ------------------------------------------------------

    def _init_finite(self, field, n, r):
        ck = coker_wp(field, r)
        self._ck = ck
        self._gen = field.multiplicative_generator()
        self._dlog = {}
        acc = field.one
        for e in range(field.q - 1):
            self._dlog[acc.index] = e
            acc = acc * self._gen
        labels = [witt_to_str(b) + ("" if n == 0 else " ; " + " , ".join(
            [elem_to_str(self._gen)] * n)) for b in ck.basis]
        self.presentation = GroupPresentation(field.p, r, labels)
        if n == 0:
            for b in field.elements():
                for j in range(r):
                    self.presentation.add_relation(ck.coords(wp(v_teichmuller(b, j, r))))
            self.census["wp-rows"] = field.q * r
        else:
            for i in range(len(ck.basis)):
                self.presentation.add_relation_sparse({i: field.q - 1})
            self.census["unit-order-rows"] = len(ck.basis)

    def class_coords_finite(self, s):
        terms = as_expr(s)
        vec = np.zeros(len(self._ck.basis), dtype=np.int64)
        for t in terms:
            mult = t.coeff
            for b in t.bs:
                mult *= self._dlog[b.index]
            vec = vec + mult * self._ck.coords(t.a)
        return vec

    # -- rational function field ------------------------------------------

    def _init_ratfunc(self, rff, n, r, D, a_degree):
        if n != 1:
            raise LengthMismatch("the function-field truncation carries one multiplicative slot")
        base = rff.base
        self.D = D
        a_pool = list(_witt_pool(rff, r, a_degree))
        atoms = [rff.from_const(c) for c in base.elements() if c]
        for deg in range(1, D + 1):
            for pi in irreducible_polys(base, deg):
                atoms.append(rff.from_poly(pi))
        self.a_pool = a_pool
        self.atoms = atoms
        self._a_index = {_witt_key(a): i for i, a in enumerate(a_pool)}
        self._atom_index = {}
        for j, b in enumerate(atoms):
            self._atom_index[_atom_key(b)] = j
        labels = []
        for a in a_pool:
            for b in atoms:
                labels.append(kato_to_str(KatoSymbol(a, (b,))))
        self.presentation = GroupPresentation(rff.p, r, labels)
        na = len(atoms)

        def gidx(ai, bj):
            return ai * na + bj

        n_add = n_const = n_slot = n_wp = 0
        # additivity in the Witt slot whenever the sum stays in the pool
        for i, a in enumerate(a_pool):
            for j in range(i, len(a_pool)):
                ssum = a + a_pool[j]
                k = self._a_index.get(_witt_key(ssum))
                if k is None:
                    continue
                for bj in range(na):
                    self.presentation.add_relation_sparse(
                        _srow([(gidx(i, bj), 1), (gidx(j, bj), 1), (gidx(k, bj), -1)]))
                    n_add += 1
        # multiplicativity among constant atoms
        consts = [c for c in base.elements() if c]
        cidx = {c.index: self._atom_index[("c", c.index)] for c in consts}
        for x in consts:
            for y in consts:
                z = cidx[(x * y).index]
                for ai in range(len(a_pool)):
                    self.presentation.add_relation_sparse(
                        _srow([(gidx(ai, cidx[x.index]), 1), (gidx(ai, cidx[y.index]), 1),
                               (gidx(ai, z), -1)]))
                    n_const += 1
        # single-coordinate Witt slot against the equal multiplicative entry
        for b in atoms:
            f = b
            for j in range(r):
                a = v_teichmuller(f, j, r)
                ai = self._a_index.get(_witt_key(a))
                bj = self._atom_index[_atom_key(b)]
                if ai is not None:
                    self.presentation.add_relation_sparse({gidx(ai, bj): 1})
                    n_slot += 1
        # Frobenius-minus-identity images staying in the pool
        for a in a_pool:
            img = wp(a)
            ai = self._a_index.get(_witt_key(img))
            if ai is None:
                continue
            for bj in range(na):
                self.presentation.add_relation_sparse({gidx(ai, bj): 1})
                n_wp += 1
        self.census.update({"witt-additivity": n_add, "constant-products": n_const,
                            "slot-rows": n_slot, "wp-rows": n_wp})
        self._gidx = gidx

    def class_coords(self, s):
        """Coordinates of a symbol sum over the pool generators; entries must
        factor into pool atoms and Witt slots must be pool members."""
        if isinstance(self.ring, FqField):
            return self.class_coords_finite(s)
        vec = np.zeros(self.presentation.ngens, dtype=np.int64)
        for t in as_expr(s):
            ai = self._a_index.get(_witt_key(t.a))
            if ai is None:
                raise TooLarge("Witt slot outside the truncation pool")
            b = t.bs[0]
            c, num_f = factor_poly(b.num)
            cd, den_f = factor_poly(b.den)
            cc = c / cd
            pieces = []
            if cc != self.ring.base.one:
                pieces.append((("c", cc.index), 1))
            pieces.extend((("p", pi.key()), e) for pi, e in num_f)
            pieces.extend((("p", pi.key()), -e) for pi, e in den_f)
            for key, e in pieces:
                bj = self._atom_index.get(key)
                if bj is None:
                    raise TooLarge("multiplicative entry outside the atom pool")
                vec[self._gidx(ai, bj)] += t.coeff * e
        return vec

    def is_zero_class(self, s):
        return self.presentation.is_zero_class(self.class_coords(s))

    def order(self):
        return self.presentation.order()


def _witt_pool(rff, r, a_degree):
    """Witt vectors whose entries are polynomials of degree <= a_degree, in
    index order (small pools only)."""
    base = rff.base
    polys = []
    from .funcfield import Poly
    count = base.q ** (a_degree + 1)
    if count ** r > 4096:
        raise TooLarge("Witt pool too large")
    for idx in range(count):
        coeffs = []
        v = idx
        for _ in range(a_degree + 1):
            coeffs.append(base.elem_by_index(v % base.q))
            v //= base.q
        polys.append(rff.from_poly(Poly(base, tuple(coeffs))))
    for combo in itertools.product(polys, repeat=r):
        yield WittVector(rff, combo)


def _witt_key(a):
    return tuple(e.key() for e in a.entries)


def _atom_key(b):
    if b.is_constant():
        return ("c", b.constant_value().index)
    return ("p", b.num.key())


def _srow(items):
    row = {}
    for i, c in items:
        row[i] = row.get(i, 0) + c
    return {i: c for i, c in row.items() if c}


# ---------------------------------------------------------------------------
# reciprocity reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HbnReport:
    ok: bool
    n_tame: int
    n_wild: int
    n_probe: int
    failures: tuple


def hbn_check(q_field, r, D, n_random=100, n_probe=20, seed=0):
    """Reciprocity and truncated-injectivity checks over F_q(t).

    Random tame samples (constant Witt slots) at the given r, plus random
    r = 1 samples with unrestricted Witt slots (wild places go through the
    local-symbol formula): every invariant vector must sum to zero.  For
    the probe, random pool combinations with vanishing invariant vectors
    must reduce to zero in the truncated presentation."""
    rng = _random.Random(seed)
    rff = make_ratfunc_field(q_field)
    base = q_field
    failures = []
    trunc = HGroupTruncation(rff, 1, r, D=D)

    def rand_unit():
        num = _rand_poly(rng, rff, D)
        den = _rand_poly(rng, rff, D)
        return num / den

    n_tame = 0
    for _ in range(n_random):
        a = WittVector(rff, tuple(
            rff.from_const(base.elem_by_index(rng.randrange(base.q))) for _ in range(r)))
        s = KatoSymbol(a, (rand_unit(),), rng.randrange(1, rff.p ** r))
        if hbn_sum(s) != 0:
            failures.append(("tame-sum", kato_to_str(s)))
        n_tame += 1
    n_wild = 0
    if r == 1:
        for _ in range(n_random):
            aa = rand_unit()
            s = KatoSymbol(WittVector(rff, (aa,)), (rand_unit(),))
            if hbn_sum(s) != 0:
                failures.append(("wild-sum", kato_to_str(s)))
            n_wild += 1
    n_probe_done = 0
    for _ in range(n_probe):
        expr = _zero_invariant_combo(rng, trunc, r)
        iv = invariant_vector(expr)
        if not iv.is_zero():
            failures.append(("probe-not-zero-vector", [kato_to_str(t) for t in expr]))
            continue
        if not trunc.is_zero_class(expr):
            failures.append(("probe-not-zero-class", [kato_to_str(t) for t in expr]))
        n_probe_done += 1
    return HbnReport(not failures, n_tame, n_wild, n_probe_done, tuple(failures))


def _rand_poly(rng, rff, D):
    from .funcfield import Poly
    base = rff.base
    while True:
        deg = rng.randrange(D + 1)
        coeffs = [base.elem_by_index(rng.randrange(base.q)) for _ in range(deg + 1)]
        po = Poly(base, tuple(coeffs))
        if not po.is_zero():
            return rff.from_poly(po)


def _zero_invariant_combo(rng, trunc, r):
    """A random integer combination of in-pool relation instances, hence a
    zero class with a zero invariant vector.  For r > 1 only Witt slots
    with constant entries are drawn, keeping every place tame."""
    rff = trunc.ring
    if r > 1:
        a_pool = [a for a in trunc.a_pool
                  if all(e.is_zero() or e.is_constant() for e in a.entries)]
    else:
        a_pool = trunc.a_pool
    terms = []
    for _ in range(rng.randrange(1, 4)):
        kind = rng.randrange(3)
        if kind == 0:
            a = rng.choice(a_pool)
            while not any(not e.is_zero() for e in a.entries):
                a = rng.choice(a_pool)
            b = rng.choice(trunc.atoms)
            c = rng.randrange(1, rff.p ** r)
            # additivity instance when the pool contains the sum, else a
            # plain cancelling pair
            a2 = rng.choice(a_pool)
            ssum = a + a2
            if _witt_key(ssum) in trunc._a_index:
                terms.append(KatoSymbol(a, (b,), c))
                terms.append(KatoSymbol(a2, (b,), c))
                terms.append(KatoSymbol(ssum, (b,), -c))
            else:
                terms.append(KatoSymbol(a, (b,), c))
                terms.append(KatoSymbol(a, (b,), -c))
        elif kind == 1:
            # constant-slot product relation
            base = rff.base
            units = [u for u in base.elements() if u]
            x, y = rng.choice(units), rng.choice(units)
            a = rng.choice(a_pool)
            terms.append(KatoSymbol(a, (rff.from_const(x),)))
            terms.append(KatoSymbol(a, (rff.from_const(y),)))
            terms.append(KatoSymbol(a, (rff.from_const(x * y),), -1))
        else:
            # Frobenius-minus-identity image with constant entries
            base = rff.base
            w = WittVector(rff, tuple(
                rff.from_const(base.elem_by_index(rng.randrange(base.q))) for _ in range(r)))
            img = wp(w)
            if _witt_key(img) in trunc._a_index:
                terms.append(KatoSymbol(img, (rng.choice(trunc.atoms),)))
    if not terms:
        a = trunc.a_pool[0]
        terms = [KatoSymbol(a, (trunc.atoms[0],)), KatoSymbol(a, (trunc.atoms[0],), -1)]
    return tuple(terms)


# ---------------------------------------------------------------------------
# wire format
# ---------------------------------------------------------------------------

def _b_to_str(b):
    if isinstance(b, FqElem):
        return elem_to_str(b)
    return ratfunc_to_str(b)


def kato_to_str(s):
    body = witt_to_str(s.a) + " | " + ", ".join(_b_to_str(b) for b in s.bs)
    core = "<" + body + ">"
    if s.coeff == 1:
        return core
    return f"{s.coeff}*{core}"


def parse_kato(text, ring, r):
    t = text.strip()
    coeff = 1
    if "*<" in t:
        head, t = t.split("*<", 1)
        t = "<" + t
        coeff = int(head)
    if not (t.startswith("<") and t.endswith(">")):
        raise ParseError(f"symbol must be wrapped in <...>: {text!r}")
    body = t[1:-1]
    if "|" not in body:
        raise ParseError("missing | separator between Witt and multiplicative slots")
    a_part, b_part = body.split("|", 1)
    a = parse_witt(a_part.strip(), ring, r)
    from .funcfield import _split_top
    bs = []
    for piece, _sep in _split_top(b_part.strip(), ","):
        piece = piece.strip()
        if isinstance(ring, RatFuncField):
            bs.append(parse_ratfunc(piece, ring))
        else:
            from .fields import parse_elem
            bs.append(parse_elem(piece, ring))
    return KatoSymbol(a, tuple(bs), coeff)
