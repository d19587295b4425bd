"""Truncated p-typical Witt vectors over the package's exact fields.

Ring operations evaluate universal structure polynomials obtained from the
ghost-component recursion over Z: with w_i(X) = sum_{j<=i} p^j X_j^(p^(i-j)),
the sum polynomials satisfy w_i(S) = w_i(X) + w_i(Y) and are integral; the
product and negation families work the same way.  The recursion runs once
per (p, r), is re-checked symbolically, and the coefficients are then
reduced mod p since the entries live in characteristic p.

Truncation lengths are capped at r = 4; the recursion is exact at any
length but nothing in this package needs more and the polynomial sizes grow
fast.
"""

from __future__ import annotations

import numpy as np

from .errors import FieldMismatch, LengthMismatch, LengthTooLarge, ParseError, TooLarge
from .fields import FqElem, FqField, make_field
from .funcfield import RatFunc, RatFuncField, parse_ratfunc, ratfunc_to_str
from .linalg import GroupPresentation, HowellBasis

MAX_LENGTH = 4


# ---------------------------------------------------------------------------
# sparse integer polynomials, exponent-tuple keyed; plumbing for the recursion
# ---------------------------------------------------------------------------

def _padd(a, b):
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, 0) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def _pscale(a, s):
    if s == 0:
        return {}
    return {e: c * s for e, c in a.items()}


def _pmul(a, b):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            s = out.get(e, 0) + c1 * c2
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return out


def _ppow(a, n, nvars):
    result = {(0,) * nvars: 1}
    base = a
    while n:
        if n & 1:
            result = _pmul(result, base)
        n >>= 1
        if n:
            base = _pmul(base, base)
    return result


def _pvar(i, nvars):
    e = [0] * nvars
    e[i] = 1
    return {tuple(e): 1}


def _ghost_poly(var_ids, i, p, nvars):
    w = {}
    for j in range(i + 1):
        w = _padd(w, _pscale(_ppow(_pvar(var_ids[j], nvars), p ** (i - j), nvars), p ** j))
    return w


class WittPolyCache:
    """Structure polynomials for W_r in characteristic p.

    sum_polys / prod_polys live in 2r variables (X then Y), neg_polys in r.
    Each entry is a list of (exponent tuple, coefficient in [1, p)) pairs
    with zero-mod-p terms dropped.
    """

    __slots__ = ("p", "r", "sum_polys", "prod_polys", "neg_polys")

    def __init__(self, p, r, sum_z, prod_z, neg_z):
        self.p = p
        self.r = r
        self.sum_polys = [self._modp(q, p) for q in sum_z]
        self.prod_polys = [self._modp(q, p) for q in prod_z]
        self.neg_polys = [self._modp(q, p) for q in neg_z]

    @staticmethod
    def _modp(poly, p):
        return tuple(sorted((e, c % p) for e, c in poly.items() if c % p))


_WITT_POLY_CACHE = {}


def witt_polys(p, r):
    """The cached structure polynomials for (p, r); builds and verifies on first use."""
    if r < 1:
        raise LengthMismatch("truncation length must be >= 1")
    if r > MAX_LENGTH:
        raise LengthTooLarge(f"truncation length {r} exceeds the supported cap {MAX_LENGTH}")
    key = (p, r)
    cached = _WITT_POLY_CACHE.get(key)
    if cached is not None:
        return cached
    nv2 = 2 * r
    X = list(range(r))
    Y = list(range(r, 2 * r))
    sum_t = [_padd(_ghost_poly(X, i, p, nv2), _ghost_poly(Y, i, p, nv2)) for i in range(r)]
    prod_t = [_pmul(_ghost_poly(X, i, p, nv2), _ghost_poly(Y, i, p, nv2)) for i in range(r)]
    neg_t = [_pscale(_ghost_poly(X, i, p, r), -1) for i in range(r)]
    sum_z = _solve_rec(p, r, sum_t, nv2)
    prod_z = _solve_rec(p, r, prod_t, nv2)
    neg_z = _solve_rec(p, r, neg_t, r)
    if r <= 3:
        _verify_ghost(p, r, sum_z, sum_t, nv2)
        _verify_ghost(p, r, prod_z, prod_t, nv2)
        _verify_ghost(p, r, neg_z, neg_t, r)
    cached = WittPolyCache(p, r, sum_z, prod_z, neg_z)
    _WITT_POLY_CACHE[key] = cached
    return cached


def _solve_rec(p, r, target, nvars):
    out = []
    for i in range(r):
        acc = target[i]
        for j in range(i):
            acc = _padd(acc, _pscale(_ppow(out[j], p ** (i - j), nvars), -(p ** j)))
        coeffs = {}
        for e, c in acc.items():
            if c % p ** i:
                raise ArithmeticError("ghost recursion produced a non-integral coefficient")
            v = c // p ** i
            if v:
                coeffs[e] = v
        out.append(coeffs)
    return out


def _verify_ghost(p, r, solved, target, nvars):
    """Recompose sum_j p^j solved_j^(p^(i-j)) and compare with the target ghost."""
    for i in range(r):
        acc = {}
        for j in range(i + 1):
            acc = _padd(acc, _pscale(_ppow(solved[j], p ** (i - j), nvars), p ** j))
        if _padd(acc, _pscale(target[i], -1)):
            raise ArithmeticError(f"ghost identity failed at coordinate {i} for p={p}, r={r}")


# ---------------------------------------------------------------------------
# ghost-component oracle over the integers (prime-field entries)
# ---------------------------------------------------------------------------

def ghost_components(p, xs):
    """Integer ghost components of an integer coordinate vector."""
    out = []
    for i in range(len(xs)):
        out.append(sum(p ** j * xs[j] ** (p ** (i - j)) for j in range(i + 1)))
    return out


def witt_int_op_via_ghost(p, op, xs, ys=None):
    """Brute-force Witt op on integer vectors by solving ghost equations over Z.

    op is 'add', 'mul' or 'neg'.  Completely independent of the cached
    structure polynomials; used as a test oracle and for derivations.
    """
    gx = ghost_components(p, xs)
    if op == "add":
        target = [a + b for a, b in zip(gx, ghost_components(p, ys))]
    elif op == "mul":
        target = [a * b for a, b in zip(gx, ghost_components(p, ys))]
    elif op == "neg":
        target = [-a for a in gx]
    else:
        raise ValueError(op)
    out = []
    for i in range(len(xs)):
        acc = target[i] - sum(p ** j * out[j] ** (p ** (i - j)) for j in range(i))
        if acc % p ** i:
            raise ArithmeticError("non-integral ghost solution")
        out.append(acc // p ** i)
    return out


# ---------------------------------------------------------------------------
# Witt vectors
# ---------------------------------------------------------------------------

def _ring_zero(ring):
    return ring.zero


def _entry_pth_power(x):
    if isinstance(x, FqElem):
        return x.frobenius()
    return x.pth_power()


class WittVector:
    """Element of W_r over an FqField or a RatFuncField."""

    __slots__ = ("ring", "r", "entries")

    def __init__(self, ring, entries):
        entries = tuple(entries)
        if not 1 <= len(entries) <= MAX_LENGTH:
            raise LengthTooLarge(f"length {len(entries)} outside 1..{MAX_LENGTH}")
        self.ring = ring
        self.r = len(entries)
        self.entries = entries

    @staticmethod
    def zero(ring, r):
        return WittVector(ring, (_ring_zero(ring),) * r)

    def _check(self, other):
        if not isinstance(other, WittVector):
            raise TypeError(f"expected WittVector, got {type(other).__name__}")
        if other.ring is not self.ring:
            raise FieldMismatch("Witt vectors over different rings")
        if other.r != self.r:
            raise LengthMismatch(f"lengths {self.r} and {other.r}")

    def _evaluate(self, polys, xs):
        ring = self.ring
        p = ring.p
        powers = {}

        def var_pow(i, e):
            got = powers.get((i, e))
            if got is None:
                if e == 1:
                    got = xs[i]
                elif e % 2 == 0:
                    h = var_pow(i, e // 2)
                    got = h * h
                else:
                    got = var_pow(i, e - 1) * xs[i]
                powers[(i, e)] = got
            return got

        out = []
        for poly in polys:
            acc = ring.zero
            for exps, coeff in poly:
                term = None
                for i, e in enumerate(exps):
                    if e:
                        v = var_pow(i, e)
                        term = v if term is None else term * v
                if term is None:
                    term = ring.one
                for _ in range(coeff):
                    acc = acc + term
            out.append(acc)
        return out

    def __add__(self, other):
        self._check(other)
        cache = witt_polys(self.ring.p, self.r)
        return WittVector(self.ring, self._evaluate(cache.sum_polys, self.entries + other.entries))

    def __mul__(self, other):
        if isinstance(other, int):
            return self.int_mul(other)
        self._check(other)
        cache = witt_polys(self.ring.p, self.r)
        return WittVector(self.ring, self._evaluate(cache.prod_polys, self.entries + other.entries))

    __rmul__ = __mul__

    def __neg__(self):
        cache = witt_polys(self.ring.p, self.r)
        return WittVector(self.ring, self._evaluate(cache.neg_polys, self.entries))

    def __sub__(self, other):
        return self + (-other)

    def int_mul(self, n):
        """n-fold sum; n may be any integer."""
        if n < 0:
            return (-self).int_mul(-n)
        acc = WittVector.zero(self.ring, self.r)
        base = self
        while n:
            if n & 1:
                acc = acc + base
            n >>= 1
            if n:
                base = base + base
        return acc

    def is_zero(self):
        return all(not e for e in self.entries)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return self.ring is other.ring and self.entries == other.entries

    def __hash__(self):
        return hash((id(self.ring), self.r) + tuple(_entry_key(e) for e in self.entries))

    def frobenius(self):
        """W_r(x -> x^p), entrywise p-th powers."""
        return WittVector(self.ring, tuple(_entry_pth_power(e) for e in self.entries))

    def verschiebung(self):
        """Shift: (x0,...,x_{r-1}) -> (0, x0, ..., x_{r-2}), same length."""
        return WittVector(self.ring, (self.ring.zero,) + self.entries[: self.r - 1])

    def map_entries(self, fn, new_ring=None):
        return WittVector(new_ring if new_ring is not None else self.ring,
                          tuple(fn(e) for e in self.entries))

    def __repr__(self):
        return witt_to_str(self)


def _entry_key(e):
    if isinstance(e, FqElem):
        return ("fq", e.index)
    return ("rf", e.key())


def teichmuller(b, r):
    """[b] = (b, 0, ..., 0) of length r."""
    ring = b.field
    return WittVector(ring, (b,) + (ring.zero,) * (r - 1))


def v_teichmuller(b, j, r):
    """V^j [b]: the vector with b in coordinate j and zeros elsewhere."""
    ring = b.field
    entries = [ring.zero] * r
    entries[j] = b
    return WittVector(ring, entries)


def wp(x):
    """The additive endomorphism F - id with F the entrywise p-th power map."""
    return x.frobenius() - x


def witt_decompose(x):
    """Coordinates as a sum of shifted Teichmuellers: x = sum_j V^j [x_j]."""
    return [v_teichmuller(e, j, x.r) for j, e in enumerate(x.entries)]


def enumerate_witt_vectors(field, r):
    """All of W_r(F_q) in index order (coordinate 0 least significant)."""
    if field.q ** r > 1 << 20:
        raise TooLarge(f"W_{r}({field}) has {field.q ** r} elements, over the enumeration cap")
    idx = [0] * r
    while True:
        yield WittVector(field, tuple(field.elem_by_index(i) for i in idx))
        j = 0
        while j < r:
            idx[j] += 1
            if idx[j] < field.q:
                break
            idx[j] = 0
            j += 1
        if j == r:
            return


def witt_index(x):
    v = 0
    for e in reversed(x.entries):
        v = v * x.ring.q + e.index
    return v


# ---------------------------------------------------------------------------
# W_r(F_p) as Z/p^r, by table
# ---------------------------------------------------------------------------

_WITTFP_TABLES = {}


def _wittfp_tables(p, r):
    key = (p, r)
    got = _WITTFP_TABLES.get(key)
    if got is None:
        fp = make_field(p)
        one = teichmuller(fp.one, r)
        acc = WittVector.zero(fp, r)
        to_int = {}
        from_int = {}
        for m in range(p ** r):
            k = tuple(e.index for e in acc.entries)
            to_int[k] = m
            from_int[m] = acc
            acc = acc + one
        if len(to_int) != p ** r:  # pragma: no cover - [1] generates W_r(F_p)
            raise ArithmeticError("W_r(F_p) is not cyclic on [1]?")
        got = (to_int, from_int)
        _WITTFP_TABLES[key] = got
    return got


def wittfp_to_int(x):
    """The isomorphism W_r(F_p) -> Z/p^r sending [1] to 1."""
    if not isinstance(x.ring, FqField) or x.ring.k != 1:
        raise FieldMismatch("wittfp_to_int needs entries in a prime field")
    return _wittfp_tables(x.ring.p, x.r)[0][tuple(e.index for e in x.entries)]


def int_to_wittfp(p, r, m):
    return _wittfp_tables(p, r)[1][m % p ** r]


def witt_trace(x, sub_k):
    """Witt trace over the constant subfield of degree sub_k: sum of conjugates.

    Entries of x live in F_{p^k} with sub_k | k; conjugation is the
    entrywise Frobenius iterate, a ring map, so summing the m = k/sub_k
    conjugates lands in the Witt vectors of the subfield coordinatewise.
    """
    field = x.ring
    if not isinstance(field, FqField):
        raise FieldMismatch("witt_trace is for constant-field Witt vectors")
    if field.k % sub_k:
        raise FieldMismatch(f"degree {sub_k} does not divide {field.k}")
    m = field.k // sub_k
    acc = x
    cur = x
    for _ in range(m - 1):
        cur = cur.map_entries(lambda e: e.frobenius(sub_k))
        acc = acc + cur
    return acc


def witt_trace_invariant(x):
    """Full trace to W_r(F_p) read as an integer mod p^r."""
    field = x.ring
    tr = witt_trace(x, 1)
    fp = make_field(field.p)
    down = tr.map_entries(lambda e: fp.from_int(e.as_int()), fp)
    return wittfp_to_int(down)


# ---------------------------------------------------------------------------
# the Artin-Schreier-Witt cokernel W_r(F_q) / wp
# ---------------------------------------------------------------------------

class WpCokernel:
    """W_r(F_q)/(F - id) with exact coordinates.

    W_r(F_q) is a free Z/p^r-module on the Teichmueller lifts of the
    polynomial basis of F_q; an addition-chain walk tabulates coordinates
    for every element, and the image of F - id on the shifted Teichmueller
    generators spans the relation module.
    """

    def __init__(self, field, r):
        if field.q ** r > 1 << 20:
            raise TooLarge(f"enumeration cap exceeded for {field}, r={r}")
        self.field = field
        self.r = r
        self.p = field.p
        self.m = field.p ** r
        basis = [teichmuller(field.elem_by_index(field.p ** i), r) for i in range(field.k)]
        self.basis = basis
        table = {}
        items = [(WittVector.zero(field, r), (0,) * field.k)]
        table[tuple(e.index for e in items[0][0].entries)] = items[0][1]
        for j, b in enumerate(basis):
            cur = WittVector.zero(field, r)
            new_items = list(items)
            for c in range(1, self.m):
                cur = cur + b
                for w, coords in items:
                    nw = w + cur
                    nc = coords[:j] + (c,) + coords[j + 1:]
                    key = tuple(e.index for e in nw.entries)
                    if key in table:  # pragma: no cover - basis freeness
                        raise ArithmeticError("Teichmueller basis is not free")
                    table[key] = nc
                    new_items.append((nw, nc))
            items = new_items
        if len(table) != field.q ** r:  # pragma: no cover
            raise ArithmeticError("coordinate table incomplete")
        self._coords = table
        labels = [witt_to_str(b) for b in basis]
        self.presentation = GroupPresentation(field.p, r, labels)
        for b in field.elements():
            for j in range(r):
                img = wp(v_teichmuller(b, j, r))
                self.presentation.add_relation(self.coords(img))
        self.order = self.presentation.order()
        self.distinguished = self.coords(teichmuller(field.one, r))

    def coords(self, x):
        if x.ring is not self.field or x.r != self.r:
            raise FieldMismatch("Witt vector from the wrong module")
        return np.array(self._coords[tuple(e.index for e in x.entries)], dtype=np.int64)

    def class_reduce(self, x):
        return self.presentation.reduce_class(self.coords(x))

    def is_zero_class(self, x):
        return self.presentation.is_zero_class(self.coords(x))

    def classes_equal(self, x, y):
        return self.presentation.is_zero_class(self.coords(x) - self.coords(y))

    def class_order(self, x):
        return self.presentation.class_order(self.coords(x))

    def distinguished_is_generator(self):
        return self.presentation.class_order(self.distinguished) == self.order

    def invariant_int(self, x):
        """Class invariant in Z/p^r via the full Witt trace; an isomorphism
        on the cokernel since the trace is onto and kills F - id."""
        return witt_trace_invariant(x)

    def to_json_dict(self):
        d = self.presentation.to_json_dict()
        d["distinguished_generator"] = [int(c) for c in self.distinguished]
        d["distinguished_is_generator"] = self.distinguished_is_generator()
        return d


_COKER_CACHE = {}


def coker_wp(field, r):
    key = (id(field), r)
    got = _COKER_CACHE.get(key)
    if got is None:
        got = WpCokernel(field, r)
        _COKER_CACHE[key] = got
    return got


# ---------------------------------------------------------------------------
# vectorized index tables for exhaustive ring checks
# ---------------------------------------------------------------------------

def _field_index_tables(field):
    q = field.q
    add = np.zeros((q, q), dtype=np.int32)
    mul = np.zeros((q, q), dtype=np.int32)
    els = [field.elem_by_index(i) for i in range(q)]
    for i in range(q):
        for j in range(i, q):
            s = (els[i] + els[j]).index
            m = (els[i] * els[j]).index
            add[i, j] = add[j, i] = s
            mul[i, j] = mul[j, i] = m
    return add, mul


def witt_op_tables(field, r):
    """(add, mul, neg) index tables for all of W_r(F_q), built by evaluating
    the cached structure polynomials on every pair at once.

    Index encoding matches witt_index: coordinate 0 least significant.
    Intended for exhaustive axiom checking at q^r <= 2^8 scale.
    """
    q = field.q
    n = q ** r
    if n > 1 << 10:
        raise TooLarge(f"table cap exceeded: {n} elements")
    fadd, fmul = _field_index_tables(field)
    cache = witt_polys(field.p, r)
    idx = np.arange(n, dtype=np.int64)
    coords = [(idx // q ** i) % q for i in range(r)]
    A = np.repeat(idx, n)
    B = np.tile(idx, n)
    xa = [((A // q ** i) % q).astype(np.int32) for i in range(r)]
    xb = [((B // q ** i) % q).astype(np.int32) for i in range(r)]

    def eval_polys(polys, xs):
        nvar = len(xs)
        size = xs[0].shape[0]
        pow_cache = {}

        def var_pow(i, e):
            got = pow_cache.get((i, e))
            if got is None:
                if e == 1:
                    got = xs[i]
                elif e % 2 == 0:
                    h = var_pow(i, e // 2)
                    got = fmul[h, h]
                else:
                    got = fmul[var_pow(i, e - 1), xs[i]]
                pow_cache[(i, e)] = got
            return got

        out = []
        for poly in polys:
            acc = np.zeros(size, dtype=np.int32)
            for exps, coeff in poly:
                term = None
                for i, e in enumerate(exps):
                    if e:
                        v = var_pow(i, e)
                        term = v if term is None else fmul[term, v]
                if term is None:
                    term = np.full(size, 1, dtype=np.int32)
                for _ in range(coeff):
                    acc = fadd[acc, term]
            out.append(acc)
        return out

    def pack(coord_arrs):
        total = np.zeros(coord_arrs[0].shape[0], dtype=np.int64)
        for i in reversed(range(r)):
            total = total * q + coord_arrs[i]
        return total

    add_t = pack(eval_polys(cache.sum_polys, xa + xb)).reshape(n, n)
    mul_t = pack(eval_polys(cache.prod_polys, xa + xb)).reshape(n, n)
    neg_c = [(c.astype(np.int32)) for c in coords]
    neg_t = pack(eval_polys(cache.neg_polys, neg_c))
    return add_t, mul_t, neg_t


# ---------------------------------------------------------------------------
# wire format
# ---------------------------------------------------------------------------

def _entry_to_str(e):
    if isinstance(e, FqElem):
        from .fields import elem_to_str
        return elem_to_str(e)
    return ratfunc_to_str(e)


def witt_to_str(x):
    return "(" + "; ".join(_entry_to_str(e) for e in x.entries) + ")"


def parse_witt(text, ring, r):
    t = text.strip()
    if not (t.startswith("(") and t.endswith(")")):
        raise ParseError(f"Witt vector must be parenthesized: {text!r}")
    body = t[1:-1]
    parts = [s.strip() for s in body.split(";")]
    if len(parts) != r:
        raise LengthMismatch(f"{len(parts)} entries for length {r}")
    entries = []
    for s in parts:
        if isinstance(ring, RatFuncField):
            entries.append(parse_ratfunc(s, ring))
        else:
            from .fields import parse_elem
            entries.append(parse_elem(s, ring))
    return WittVector(ring, entries)
