"""Milnor K-symbols, Steinberg rewriting, tame residues and reciprocity.

Symbols are formal integer combinations of tuples of nonzero field
elements.  The rewriting pass implements the defining relations (an entry
1 kills a term, entries summing to 1 or to 0 kill a term, a repeated entry
degrades to -1 in that slot) together with a sorted normal form whose sign
tracks slot transpositions.

Weight-2 symbols over a rational function field carry tame residues at
every place; the product of their norms over the full support is the
reciprocity invariant and must be 1.

K-groups mod p^r at bounded complexity are produced as explicit
generators-and-relations presentations whose computed order can only
shrink as the bound grows, so a computed trivial group is a certified one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BoundTooSmall, ParseError, SupportExceedsBound, TooLarge, ZeroEntry
from .fields import FqElem, FqField, elem_to_str, make_field, norm, parse_elem
from .funcfield import (Place, RatFunc, RatFuncField, enumerate_places, factor_poly,
                        irreducible_polys, make_ratfunc_field, monic_polys, parse_ratfunc,
                        place_to_str, places_of_support, ratfunc_to_str, residue_class,
                        valuation)
from .linalg import GroupPresentation


def _entry_sort_key(e):
    if isinstance(e, FqElem):
        return (0, e.index)
    return (1,) + e.sort_key()


def _sparse(items):
    """Accumulate (index, coeff) pairs into a sparse row, merging duplicates."""
    row = {}
    for i, c in items:
        row[i] = row.get(i, 0) + c
    return {i: c for i, c in row.items() if c}


def _is_one(e):
    if isinstance(e, FqElem):
        return e == e.field.one
    return e.num.is_one() and e.den.is_one()


def _entry_str(e):
    if isinstance(e, FqElem):
        return elem_to_str(e)
    return ratfunc_to_str(e)


class MilnorSymbol:
    """Formal integer combination of weight-n symbol tuples over one ring."""

    __slots__ = ("ring", "n", "terms")

    def __init__(self, ring, n, terms):
        merged = {}
        for coeff, entries in terms:
            entries = tuple(entries)
            if len(entries) != n:
                raise ValueError(f"expected weight {n}, got {len(entries)}")
            for e in entries:
                if not e:
                    raise ZeroEntry("symbol entries must be nonzero")
            if coeff:
                key = entries
                merged[key] = merged.get(key, 0) + coeff
        self.ring = ring
        self.n = n
        self.terms = tuple(sorted(
            ((c, es) for es, c in merged.items() if c),
            key=lambda t: tuple(_entry_sort_key(e) for e in t[1])))

    @staticmethod
    def of(entries, coeff=1):
        entries = tuple(entries)
        if not entries:
            raise ValueError("use MilnorSymbol(ring, 0, ...) for weight zero")
        ring = entries[0].field
        return MilnorSymbol(ring, len(entries), [(coeff, entries)])

    @staticmethod
    def zero(ring, n):
        return MilnorSymbol(ring, n, [])

    def __add__(self, other):
        if other.ring is not self.ring or other.n != self.n:
            raise ValueError("symbol weight or ring mismatch")
        return MilnorSymbol(self.ring, self.n, self.terms + other.terms)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return MilnorSymbol(self.ring, self.n, [(c * co, es) for co, es in self.terms])

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, MilnorSymbol):
            return NotImplemented
        return self.ring is other.ring and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.ring), self.n, len(self.terms)))

    def __repr__(self):
        return symbol_to_str(self)


def _reduce_term(ring, entries):
    """Canonical (sign, entries) for one symbol tuple, or None if it dies."""
    one = ring.one
    es = list(entries)
    sign = 1
    while True:
        for e in es:
            if _is_one(e):
                return None
        hit = False
        for i in range(len(es)):
            for j in range(i + 1, len(es)):
                s = es[i] + es[j]
                if _is_one(s):          # {x, 1-x} = 0
                    return None
                if not s:               # {x, -x} = 0
                    return None
                if es[i] == es[j]:      # {x, x} = {x, -1}
                    es[j] = -one
                    hit = True
                    break
            if hit:
                break
        if hit:
            continue
        order = sorted(range(len(es)), key=lambda k: _entry_sort_key(es[k]))
        inversions = sum(1 for a in range(len(order)) for b in range(a + 1, len(order))
                         if order[a] > order[b])
        es = [es[k] for k in order]
        if inversions % 2:
            sign = -sign
        return sign, tuple(es)


def steinberg_reduce(s):
    """Fixed point of the rewriting pass; idempotent."""
    out = []
    for coeff, entries in s.terms:
        red = _reduce_term(s.ring, entries)
        if red is None:
            continue
        sign, es = red
        out.append((sign * coeff, es))
    return MilnorSymbol(s.ring, s.n, out)


# ---------------------------------------------------------------------------
# tame residues and reciprocity over F_q(t)
# ---------------------------------------------------------------------------

def tame_symbol(s, place):
    """Residue of a weight-2 symbol at a place: the residue-field unit
    (-1)^(v(f)v(g)) g^(v(f)) f^(-v(g)) evaluated at the place, extended
    multiplicatively over terms."""
    if s.n != 2:
        raise ValueError("tame residue implemented for weight 2")
    res_field = place.residue_data()[0]
    acc = res_field.one
    for coeff, (f, g) in s.terms:
        m = valuation(f, place)
        k = valuation(g, place)
        u = g ** m / f ** k
        if (m * k) % 2:
            u = -u
        val = residue_class(u, place)
        if not val:  # pragma: no cover - unit by construction
            raise ZeroEntry("tame residue evaluated to zero")
        e = coeff % (res_field.q - 1) if res_field.q > 2 else 0
        if e:
            acc = acc * val ** e
    return acc


@dataclass(frozen=True)
class WeilReport:
    ok: bool
    rows: tuple  # (place string, residue string, norm string)
    product_str: str


def weil_check(s, D):
    """Reciprocity: the product over all support places of the norm of the
    tame residue down to the constant field equals 1."""
    if s.n != 2:
        raise ValueError("reciprocity check is for weight 2")
    rff = s.ring
    base = rff.base
    support = set()
    for _, entries in s.terms:
        for f in entries:
            if max(f.num.degree(), f.den.degree()) > D:
                raise SupportExceedsBound(
                    f"entry degree exceeds the bound {D}; support may be incomplete")
            support.update(places_of_support(f))
    support.add(Place.infinite(rff))
    prod = base.one
    rows = []
    for v in sorted(support, key=lambda w: w.sort_key()):
        res = tame_symbol(s, v)
        nm = norm(res, base)
        prod = prod * nm
        rows.append((place_to_str(v), elem_to_str(res), elem_to_str(nm)))
    return WeilReport(prod == base.one, tuple(rows), elem_to_str(prod))


# ---------------------------------------------------------------------------
# bounded presentations of K_n / p^r
# ---------------------------------------------------------------------------

def _unit_atoms(rff, D):
    """Multiplicative atoms of F_q(t)^x at bound D: the nonzero constants
    followed by the monic irreducibles of degree <= D, in index order."""
    atoms = [c for c in rff.base.elements() if c]
    for deg in range(1, D + 1):
        atoms.extend(irreducible_polys(rff.base, deg))
    return atoms


def _factor_into_atoms(f, atom_index, rff, D):
    """Exponent vector of f over the atom list; None if support exceeds D."""
    vec = {}

    def add_poly(poly, e):
        c, factors = factor_poly(poly)
        if c != rff.base.one:
            i = atom_index.get(("c", c.index))
            vec[i] = vec.get(i, 0) + e
        for pi, m in factors:
            i = atom_index.get(("p", pi.key()))
            if i is None:
                return False
            vec[i] = vec.get(i, 0) + e * m
        return True

    if not add_poly(f.num, 1):
        return None
    if not add_poly(f.den, -1):
        return None
    return vec


def k_mod_presentation(ring, n, r, D=None):
    """Presentation of K_n mod p^r on a bounded symbol pool.

    Finite field: generators are all unit tuples with every multilinearity
    and Steinberg instance as relations, so the computed group is exact.
    Rational function field: generators are tuples of multiplicative atoms
    (constants, monic irreducibles of degree <= D); general entries reduce
    to atoms by unique factorization, and Steinberg rows are instantiated
    from every ratio of bounded polynomials.  More bound means more
    relations, so computed orders only shrink in D."""
    p = ring.p
    if n == 0:
        return GroupPresentation(p, r, ["{}"])
    if isinstance(ring, FqField):
        return _k_finite(ring, n, r)
    if D is None or D < 1:
        raise BoundTooSmall("need an atom degree bound >= 1 over the function field")
    return _k_ratfunc(ring, n, r, D)


def _k_finite(field, n, r):
    units = [u for u in field.elements() if u]
    if len(units) ** n > 4096:
        raise TooLarge(f"{len(units)}^{n} generators is over the presentation cap")
    if n == 1:
        pres = GroupPresentation(field.p, r, ["{" + elem_to_str(u) + "}" for u in units])
        idx = {u.index: i for i, u in enumerate(units)}
        for x in units:
            for y in units:
                row = _sparse([(idx[x.index], 1), (idx[y.index], 1), (idx[(x * y).index], -1)])
                pres.add_relation_sparse(row)
        return pres
    if n != 2:
        raise TooLarge("finite-field presentations implemented for weight <= 2")
    gens = [(x, y) for x in units for y in units]
    labels = ["{" + elem_to_str(x) + ", " + elem_to_str(y) + "}" for x, y in gens]
    pres = GroupPresentation(field.p, r, labels)
    gi = {(x.index, y.index): i for i, (x, y) in enumerate(gens)}
    for x in units:
        for y in units:
            xy = (x * y).index
            for z in units:
                pres.add_relation_sparse(_sparse([
                    (gi[(x.index, z.index)], 1), (gi[(y.index, z.index)], 1),
                    (gi[(xy, z.index)], -1)]))
                pres.add_relation_sparse(_sparse([
                    (gi[(z.index, x.index)], 1), (gi[(z.index, y.index)], 1),
                    (gi[(z.index, xy)], -1)]))
    one = field.one
    for x in units:
        if x != one and one - x:
            pres.add_relation_sparse({gi[(x.index, (one - x).index)]: 1})
        if -x:
            pres.add_relation_sparse({gi[(x.index, (-x).index)]: 1})
    return pres


def _atom_elems(atoms, rff):
    out = []
    for a in atoms:
        if isinstance(a, FqElem):
            out.append(rff.from_const(a))
        else:
            out.append(rff.from_poly(a))
    return out


def _k_ratfunc(rff, n, r, D):
    base = rff.base
    atoms = _unit_atoms(rff, D)
    atom_index = {}
    for i, a in enumerate(atoms):
        if isinstance(a, FqElem):
            atom_index[("c", a.index)] = i
        else:
            atom_index[("p", a.key())] = i
    n_atoms = len(atoms)
    if n == 1:
        labels = ["{" + _atom_str(a) + "}" for a in atoms]
        pres = GroupPresentation(rff.p, r, labels)
        consts = [c for c in base.elements() if c]
        for x in consts:
            for y in consts:
                row = _sparse([(atom_index[("c", x.index)], 1),
                               (atom_index[("c", y.index)], 1),
                               (atom_index[("c", (x * y).index)], -1)])
                pres.add_relation_sparse(row)
        return pres
    if n != 2:
        raise TooLarge("function-field presentations implemented for weight <= 2")
    if n_atoms ** 2 > 20000:
        raise TooLarge("atom pool too large for a weight-2 presentation")
    labels = []
    for a in atoms:
        for b in atoms:
            labels.append("{" + _atom_str(a) + ", " + _atom_str(b) + "}")
    pres = GroupPresentation(rff.p, r, labels)

    def pair(i, j):
        return i * n_atoms + j

    consts = [c for c in base.elements() if c]
    ci = {c.index: atom_index[("c", c.index)] for c in consts}
    # constant bilinearity in both slots
    for x in consts:
        for y in consts:
            xy = ci[(x * y).index]
            for k in range(n_atoms):
                pres.add_relation_sparse(_sparse([
                    (pair(ci[x.index], k), 1), (pair(ci[y.index], k), 1),
                    (pair(xy, k), -1)]))
                pres.add_relation_sparse(_sparse([
                    (pair(k, ci[x.index]), 1), (pair(k, ci[y.index]), 1),
                    (pair(k, xy), -1)]))
    # antisymmetry and the {x,x} degeneration
    minus_one = ci[(-base.one).index]
    for i in range(n_atoms):
        for j in range(n_atoms):
            pres.add_relation_sparse(_sparse([(pair(i, j), 1), (pair(j, i), 1)]))
        pres.add_relation_sparse(_sparse([(pair(i, i), 1), (pair(i, minus_one), -1)]))
    one_i = ci[base.one.index]
    for k in range(n_atoms):
        pres.add_relation_sparse({pair(one_i, k): 1})
        pres.add_relation_sparse({pair(k, one_i): 1})

    # Steinberg rows from ratios of bounded polynomials: f = N/M, 1-f = (M-N)/M
    polys = [m.scale(c) for deg in range(D + 1) for m in monic_polys(base, deg)
             for c in consts]
    polys = [f for f in polys if not f.is_zero()]
    for N in polys:
        for M in polys:
            if N == M:
                continue
            f = RatFunc(rff, N, M)
            g = RatFunc(rff, M - N, M)
            vf = _factor_into_atoms(f, atom_index, rff, D)
            vg = _factor_into_atoms(g, atom_index, rff, D)
            if vf is None or vg is None:  # pragma: no cover - degrees are bounded
                continue
            row = {}
            for i, ei in vf.items():
                for j, ej in vg.items():
                    key = pair(i, j)
                    row[key] = row.get(key, 0) + ei * ej
            pres.add_relation_sparse(row)
    return pres


def _poly_str(a):
    from .funcfield import poly_to_str
    return poly_to_str(a)


def _atom_str(a):
    if isinstance(a, FqElem):
        return elem_to_str(a)
    return "(" + _poly_str(a) + ")"


def count_k1_bound(rff, r, D):
    """Independent divisor-theoretic order of the bounded K_1 mod p^r
    presentation: constants contribute gcd(p^r, q-1) = 1, each monic
    irreducible of degree <= D contributes a free Z/p^r factor."""
    from .funcfield import count_irreducibles
    n_irr = sum(count_irreducibles(rff.base.q, d) for d in range(1, D + 1))
    return rff.p ** (r * n_irr)


# ---------------------------------------------------------------------------
# the mod-p differential symbol at weight 1
# ---------------------------------------------------------------------------

def dlog_kernel_check(q, D):
    """For every f in the bounded pool of F_q(t)^x: dlog f is an exact form
    iff f is a p-th power.  Exactness goes through the Cartier oracle, the
    p-th power test through derivatives, so the two sides are computed by
    independent routes."""
    from .forms import _bounded_functions, dlog, is_exact
    p = _least_prime_factor(q)
    k = 0
    qq = q
    while qq > 1:
        qq //= p
        k += 1
    if p ** k != q:
        raise ValueError(f"{q} is not a prime power")
    rff = make_ratfunc_field(make_field(p, k))
    for f in _bounded_functions(rff, D):
        if is_exact(dlog(f)) != f.is_pth_power():
            return False
    return True


def _least_prime_factor(m):
    d = 2
    while d * d <= m:
        if m % d == 0:
            return d
        d += 1
    return m


# ---------------------------------------------------------------------------
# wire format
# ---------------------------------------------------------------------------

def symbol_to_str(s):
    if not s.terms:
        return "0"
    parts = []
    for coeff, entries in s.terms:
        body = "{" + ", ".join(_entry_str(e) for e in entries) + "}"
        if coeff == 1:
            parts.append("+ " + body if parts else body)
        elif coeff == -1:
            parts.append("- " + body)
        else:
            parts.append(("+ " if parts and coeff > 0 else "") + f"{coeff}*{body}")
    return " ".join(parts)


def parse_symbol(text, ring):
    """Parse a single symbol tuple "{f, g, ...}" over the given ring."""
    t = text.strip()
    if not (t.startswith("{") and t.endswith("}")):
        raise ParseError(f"symbol must be braced: {text!r}")
    body = t[1:-1].strip()
    if not body:
        return MilnorSymbol(ring, 0, [(1, ())])
    entries = []
    from .funcfield import _split_top
    for part, _sep in _split_top(body, ","):
        part = part.strip()
        if isinstance(ring, RatFuncField):
            entries.append(parse_ratfunc(part, ring))
        else:
            entries.append(parse_elem(part, ring))
    return MilnorSymbol(ring, len(entries), [(1, tuple(entries))])
