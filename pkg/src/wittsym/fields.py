"""Exact finite fields F_{p^k} in polynomial-basis representation.

A field is a quotient (Z/p)[x]/(m(x)) with m monic irreducible of degree k.
Elements are coefficient tuples over Z/p in the basis 1, x, ..., x^(k-1).
Every element has a canonical integer index sum(c_i * p^i), which fixes a
deterministic enumeration order used everywhere (root selection, generator
searches, reports).

Construction goes through make_field so that equal parameters always return
the identical field object; element objects are interned per field.
"""

from __future__ import annotations

from .errors import (
    ConfigError,
    FieldMismatch,
    NotASubfield,
    NotIrreducible,
    NotPrime,
    ParseError,
    ZeroInput,
)

# Fields at or below this size intern all element objects up front.
_ELEM_CACHE_CAP = 1 << 16


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# polynomial helpers over Z/p, coefficient tuples little-endian, no trailing 0
# ---------------------------------------------------------------------------

def _ztrim(c):
    n = len(c)
    while n and c[n - 1] == 0:
        n -= 1
    return tuple(c[:n])


def _zadd(a, b, p):
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % p
    return _ztrim(out)


def _zscale(a, s, p):
    s %= p
    if s == 0:
        return ()
    return _ztrim([(c * s) % p for c in a])


def _zmul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % p
    return _ztrim(out)


def _zdivmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    inv_lb = pow(lb, p - 2, p)
    q = [0] * max(len(a) - db, 0)
    while len(_ztrim(a)) - 1 >= db and _ztrim(a):
        a = list(_ztrim(a))
        da = len(a) - 1
        if da < db:
            break
        coef = (a[-1] * inv_lb) % p
        q[da - db] = coef
        for j in range(db + 1):
            a[da - db + j] = (a[da - db + j] - coef * b[j]) % p
    return _ztrim(q), _ztrim(a)


def _zmod(a, b, p):
    return _zdivmod(a, b, p)[1]


def _zgcd(a, b, p):
    while b:
        a, b = b, _zmod(a, b, p)
    if a:
        a = _zscale(a, pow(a[-1], p - 2, p), p)
    return a


def _zpowmod(base, e, mod, p):
    result = (1,)
    base = _zmod(base, mod, p)
    while e:
        if e & 1:
            result = _zmod(_zmul(result, base, p), mod, p)
        base = _zmod(_zmul(base, base, p), mod, p)
        e >>= 1
    return result


def _prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def poly_is_irreducible(coeffs, p):
    """Rabin test for a monic polynomial over Z/p given as an int tuple."""
    f = _ztrim(coeffs)
    n = len(f) - 1
    if n < 1:
        return False
    x = (0, 1)
    # x^(p^n) == x mod f
    t = x
    for _ in range(n):
        t = _zpowmod(t, p, f, p)
    if t != _zmod(x, f, p):
        return False
    for ell in _prime_factors(n):
        t = x
        for _ in range(n // ell):
            t = _zpowmod(t, p, f, p)
        g = _zgcd(_zadd(t, _zscale(x, -1, p), p), f, p)
        if g != (1,):
            return False
    return True


def default_defining_poly(p, k):
    """Least monic irreducible of degree k over Z/p.

    Candidates are ordered by the integer value sum(c_i * p^i) of the
    non-leading coefficients, so p=2 yields x^2+x+1, x^3+x+1, x^4+x+1, ...
    """
    if k == 1:
        return (0, 1)
    for v in range(p ** k):
        coeffs = []
        t = v
        for _ in range(k):
            coeffs.append(t % p)
            t //= p
        cand = tuple(coeffs) + (1,)
        if poly_is_irreducible(cand, p):
            return cand
    raise NotIrreducible(f"no irreducible of degree {k} over Z/{p}")  # pragma: no cover


class FqField:
    """The finite field with p^k elements. Use make_field, not the constructor."""

    __slots__ = (
        "p", "k", "q", "defining_poly", "_elems", "_xpow", "_inv_table",
        "zero", "one", "gen", "_frob_table", "__weakref__",
    )

    def __init__(self, p, k, defining_poly):
        self.p = p
        self.k = k
        self.q = p ** k
        self.defining_poly = defining_poly
        # reductions of x^j for j = k .. 2k-2, used by multiplication
        xpow = []
        m = defining_poly
        cur = _zmod((0,) * k + (1,), m, p) if k > 0 else ()
        for _ in range(k, 2 * k - 1):
            xpow.append(tuple(cur) + (0,) * (k - len(cur)))
            cur = _zmod(_zmul(cur, (0, 1), p), m, p)
        self._xpow = xpow
        self._elems = None
        self._inv_table = None
        self._frob_table = None
        if self.q <= _ELEM_CACHE_CAP:
            self._elems = [FqElem(self, self._coeffs_of_index(i), i) for i in range(self.q)]
        self.zero = self.elem_by_index(0)
        self.one = self.elem_by_index(1)
        self.gen = self.elem_by_index(p) if k > 1 else self.one

    # -- element bookkeeping ------------------------------------------------

    def _coeffs_of_index(self, i):
        c = []
        for _ in range(self.k):
            c.append(i % self.p)
            i //= self.p
        return tuple(c)

    def elem_by_index(self, i):
        if self._elems is not None:
            return self._elems[i]
        return FqElem(self, self._coeffs_of_index(i), i)

    def elem(self, coeffs):
        coeffs = tuple(c % self.p for c in coeffs)
        if len(coeffs) != self.k:
            coeffs = tuple(coeffs[: self.k]) + (0,) * (self.k - len(coeffs))
        idx = 0
        for c in reversed(coeffs):
            idx = idx * self.p + c
        return self.elem_by_index(idx)

    def from_int(self, c):
        return self.elem_by_index(c % self.p)

    def elements(self):
        for i in range(self.q):
            yield self.elem_by_index(i)

    def units(self):
        for i in range(1, self.q):
            yield self.elem_by_index(i)

    def multiplicative_generator(self):
        """Least element generating the unit group."""
        target = self.q - 1
        factors = _prime_factors(target) if target > 1 else []
        for i in range(1, self.q):
            g = self.elem_by_index(i)
            if all((g ** (target // ell)) != self.one for ell in factors):
                return g
        raise ZeroInput("unit group of trivial field")  # pragma: no cover

    # -- arithmetic on coefficient tuples ----------------------------------

    def _mul_coeffs(self, a, b):
        p, k = self.p, self.k
        n = 2 * k - 1
        out = [0] * n
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] = (out[i + j] + ca * cb) % p
        res = out[:k]
        for j in range(k, n):
            cj = out[j]
            if cj:
                red = self._xpow[j - k]
                for t in range(k):
                    res[t] = (res[t] + cj * red[t]) % p
        return tuple(res)

    def _inv_coeffs(self, a):
        # extended euclid against the defining polynomial
        p = self.p
        f = _ztrim(a)
        if not f:
            raise ZeroDivisionError("inverse of zero")
        g = self.defining_poly
        r0, r1 = g, f
        s0, s1 = (), (1,)
        while r1:
            q, r = _zdivmod(r0, r1, p)
            r0, r1 = r1, r
            s0, s1 = s1, _zadd(s0, _zscale(_zmul(q, s1, p), -1, p), p)
        # r0 is a unit constant
        c = pow(r0[0], p - 2, p)
        inv = _zscale(s0, c, p)
        return tuple(inv) + (0,) * (self.k - len(inv))

    def inverse_index(self, i):
        if self._inv_table is None:
            self._inv_table = [0] * self.q
        cached = self._inv_table[i]
        if cached:
            return cached
        coeffs = self._inv_coeffs(self._coeffs_of_index(i))
        idx = 0
        for c in reversed(coeffs):
            idx = idx * self.p + c
        self._inv_table[i] = idx
        return idx

    def frobenius_index(self, i):
        """Index of x^p for the element with index i, cached per field."""
        if self._frob_table is None:
            self._frob_table = {}
        idx = self._frob_table.get(i)
        if idx is None:
            x = self.elem_by_index(i)
            idx = (x ** self.p).index
            self._frob_table[i] = idx
        return idx

    def __repr__(self):
        return f"F_{self.q}"

    def __reduce__(self):
        return (make_field, (self.p, self.k, self.defining_poly))


class FqElem:
    __slots__ = ("field", "coeffs", "index")

    def __init__(self, field, coeffs, index):
        self.field = field
        self.coeffs = coeffs
        self.index = index

    def __bool__(self):
        return self.index != 0

    def __eq__(self, other):
        if not isinstance(other, FqElem):
            return NotImplemented
        return self.field is other.field and self.index == other.index

    def __hash__(self):
        return hash((id(self.field), self.index))

    def _check(self, other):
        if not isinstance(other, FqElem):
            raise TypeError(f"expected FqElem, got {type(other).__name__}")
        if other.field is not self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other):
        self._check(other)
        f = self.field
        return f.elem(tuple((a + b) % f.p for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._check(other)
        f = self.field
        return f.elem(tuple((a - b) % f.p for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        f = self.field
        return f.elem(tuple((-a) % f.p for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        f = self.field
        if self.index == 0 or other.index == 0:
            return f.zero
        return f.elem(f._mul_coeffs(self.coeffs, other.coeffs))

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def scale(self, n):
        f = self.field
        n %= f.p
        return f.elem(tuple((a * n) % f.p for a in self.coeffs))

    def inverse(self):
        if self.index == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.field.elem_by_index(self.field.inverse_index(self.index))

    def __truediv__(self, other):
        self._check(other)
        return self * other.inverse()

    def __pow__(self, e):
        f = self.field
        if e == 0:
            return f.one
        if self.index == 0:
            if e < 0:
                raise ZeroDivisionError("inverse of zero")
            return f.zero
        if e < 0:
            return self.inverse() ** (-e)
        e %= (f.q - 1) or 1
        if e == 0:
            return f.one
        result = f.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def frobenius(self, times=1):
        """Apply x -> x^p the given number of times."""
        x = self
        f = self.field
        for _ in range(times % f.k if f.k else 0):
            x = f.elem_by_index(f.frobenius_index(x.index))
        return x

    def pth_root(self):
        """Unique p-th root; Frobenius is bijective on a finite field."""
        return self.frobenius(self.field.k - 1)

    def in_prime_subfield(self):
        return all(c == 0 for c in self.coeffs[1:])

    def as_int(self):
        """Value in Z/p for prime-subfield elements."""
        if not self.in_prime_subfield():
            raise NotASubfield(f"{self} is not in the prime subfield")
        return self.coeffs[0]

    def __repr__(self):
        return elem_to_str(self)


_FIELD_CACHE = {}


def make_field(p, k=1, defining_poly=None):
    """Return F_{p^k}, constructing and caching on first use.

    The defining polynomial defaults to the least monic irreducible of
    degree k (see default_defining_poly); passing a different irreducible
    gives a distinct field object with its own element universe.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if k < 1:
        raise NotIrreducible("extension degree must be >= 1")
    register_default = False
    if defining_poly is None:
        cached = _FIELD_CACHE.get((p, k, None))
        if cached is not None:
            return cached
        defining_poly = default_defining_poly(p, k)
        register_default = True
    else:
        defining_poly = _ztrim(tuple(c % p for c in defining_poly))
        if len(defining_poly) != k + 1 or defining_poly[-1] != 1:
            raise NotIrreducible("defining polynomial must be monic of degree k")
        if k > 1 and not poly_is_irreducible(defining_poly, p):
            raise NotIrreducible(f"{defining_poly} is reducible over Z/{p}")
    full_key = (p, k, defining_poly)
    cached = _FIELD_CACHE.get(full_key)
    if cached is None:
        cached = FqField(p, k, defining_poly)
        _FIELD_CACHE[full_key] = cached
    if register_default:
        _FIELD_CACHE[(p, k, None)] = cached
    return cached


def prime_power_split(q):
    """(p, k) with q = p^k, or raise ConfigError."""
    if q < 2:
        raise ConfigError(f"{q} is not a prime power")
    p = 2
    while p * p <= q and q % p:
        p += 1
    if q % p:
        p = q
    k, qq = 0, q
    while qq > 1:
        if qq % p:
            raise ConfigError(f"{q} is not a prime power")
        qq //= p
        k += 1
    return p, k


def field_of_order(q):
    """The default finite field with q elements."""
    return make_field(*prime_power_split(q))


# ---------------------------------------------------------------------------
# embeddings
# ---------------------------------------------------------------------------

class Embedding:
    """The canonical embedding F_{p^a} -> F_{p^b} for a | b.

    The generator of the source is sent to the least root (in index order)
    of the source's defining polynomial inside the target, which makes the
    composite of canonical embeddings canonical again.
    """

    __slots__ = ("source", "target", "gen_image", "_powers", "_section")

    def __init__(self, source, target, gen_image):
        self.source = source
        self.target = target
        self.gen_image = gen_image
        pw = [target.one]
        for _ in range(source.k - 1):
            pw.append(pw[-1] * gen_image)
        self._powers = pw
        self._section = None

    def __call__(self, x):
        if x.field is not self.source:
            raise FieldMismatch(f"element of {x.field}, embedding from {self.source}")
        acc = self.target.zero
        for c, pw in zip(x.coeffs, self._powers):
            if c:
                acc = acc + pw.scale(c)
        return acc

    def section(self, y):
        """Preimage of y, or None if y is outside the image subfield."""
        if self._section is None:
            self._section = {self(x).index: x for x in self.source.elements()}
        x = self._section.get(y.index)
        return x


_EMBED_CACHE = {}


def embed(source, target):
    if source is target:
        key = (id(source), id(target))
        cached = _EMBED_CACHE.get(key)
        if cached is None:
            cached = Embedding(source, target, target.gen if source.k > 1 else target.one)
            _EMBED_CACHE[key] = cached
        return cached
    if source.p != target.p or target.k % source.k != 0:
        raise NotASubfield(f"{source} does not embed in {target}")
    key = (id(source), id(target))
    cached = _EMBED_CACHE.get(key)
    if cached is not None:
        return cached
    root = None
    for cand in target.elements():
        acc = target.zero
        pw = target.one
        for c in source.defining_poly:
            if c:
                acc = acc + pw.scale(c)
            pw = pw * cand
        if not acc:
            root = cand
            break
    if root is None:  # pragma: no cover - cannot happen for a | b
        raise NotASubfield(f"no root of {source.defining_poly} in {target}")
    cached = Embedding(source, target, root)
    _EMBED_CACHE[key] = cached
    return cached


def frobenius(x, times=1):
    return x.frobenius(times)


def relative_conjugates(x, sub):
    """Galois orbit of x over the subfield sub, as a list of m = [F:sub] elements."""
    F = x.field
    if sub.p != F.p or F.k % sub.k != 0:
        raise NotASubfield(f"{sub} is not a subfield of {F}")
    m = F.k // sub.k
    out = []
    cur = x
    for _ in range(m):
        out.append(cur)
        cur = cur.frobenius(sub.k)
    return out


def trace(x, sub):
    """Trace of x down to the subfield sub, returned as an element of sub."""
    conj = relative_conjugates(x, sub)
    acc = x.field.zero
    for c in conj:
        acc = acc + c
    pre = embed(sub, x.field).section(acc)
    if pre is None:  # pragma: no cover - trace always lands in sub
        raise NotASubfield("trace left the subfield")
    return pre


def norm(x, sub):
    """Norm of x down to the subfield sub, returned as an element of sub."""
    conj = relative_conjugates(x, sub)
    acc = x.field.one
    for c in conj:
        acc = acc * c
    pre = embed(sub, x.field).section(acc)
    if pre is None:  # pragma: no cover
        raise NotASubfield("norm left the subfield")
    return pre


def absolute_trace_int(x):
    """Trace down to the prime field, as an integer in [0, p)."""
    return trace(x, make_field(x.field.p)).coeffs[0]


# ---------------------------------------------------------------------------
# wire format
# ---------------------------------------------------------------------------

def elem_to_str(x, with_field=False):
    """Serialize: single digit for prime fields, coefficient list otherwise."""
    if x.field.k == 1:
        s = str(x.coeffs[0])
    else:
        s = "⟨" + ",".join(str(c) for c in x.coeffs) + "⟩"
    if with_field:
        s += f" over F_{x.field.q}"
    return s


def parse_elem(text, field):
    """Parse the elem_to_str format; accepts ASCII <...> brackets as well."""
    t = text.strip()
    if t.startswith("⟨") or t.startswith("<"):
        closer = "⟩" if t.startswith("⟨") else ">"
        end = t.find(closer)
        if end < 0:
            raise ParseError(f"unterminated coefficient list: {text!r}")
        body = t[1:end]
        try:
            coeffs = [int(c.strip()) for c in body.split(",") if c.strip() != ""]
        except ValueError as e:
            raise ParseError(f"bad coefficient in {text!r}") from e
        if len(coeffs) > field.k:
            raise ParseError(f"{len(coeffs)} coefficients for {field}")
        return field.elem(coeffs)
    try:
        v = int(t)
    except ValueError as e:
        raise ParseError(f"cannot parse field element {text!r}") from e
    return field.from_int(v)
