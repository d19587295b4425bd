"""The rational function field F_q(t): polynomials, places, local expansions.

Rational functions are kept in lowest terms with monic denominator, so
equality is literal equality of the stored pair.  A place is either a monic
irreducible polynomial or the degree-one place at infinity with uniformizer
1/t.  Local expansions at a finite place of degree d happen over the residue
field F_{q^d} around a fixed root of the place polynomial; at infinity they
are expansions in 1/t.
"""

from __future__ import annotations

from .errors import (
    FieldMismatch,
    InsufficientPrecision,
    NotIrreducible,
    ParseError,
    PoleAtPlace,
    ZeroInput,
)
from .fields import FqElem, embed, make_field, parse_elem, elem_to_str
from .fields import _prime_factors  # noqa: F401  (shared utility)


class Poly:
    """Polynomial over an FqField, little-endian coefficient tuple, trimmed."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        n = len(coeffs)
        while n and not coeffs[n - 1]:
            n -= 1
        self.field = field
        self.coeffs = tuple(coeffs[:n])

    @staticmethod
    def from_ints(field, ints):
        return Poly(field, [field.from_int(c) for c in ints])

    @staticmethod
    def zero(field):
        return Poly(field, ())

    @staticmethod
    def one(field):
        return Poly(field, (field.one,))

    @staticmethod
    def x(field):
        return Poly(field, (field.zero, field.one))

    @staticmethod
    def const(c):
        return Poly(c.field, (c,))

    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def is_one(self):
        return len(self.coeffs) == 1 and self.coeffs[0] == self.field.one

    def is_constant(self):
        return len(self.coeffs) <= 1

    def leading(self):
        if not self.coeffs:
            raise ZeroInput("leading coefficient of zero polynomial")
        return self.coeffs[-1]

    def constant_coeff(self):
        return self.coeffs[0] if self.coeffs else self.field.zero

    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == self.field.one

    def _check(self, other):
        if not isinstance(other, Poly):
            raise TypeError(f"expected Poly, got {type(other).__name__}")
        if other.field is not self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other):
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(self.field, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Poly(self.field, [-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, FqElem):
            other = Poly.const(other)
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Poly.zero(self.field)
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, ca in enumerate(self.coeffs):
            if ca:
                for j, cb in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + ca * cb
        return Poly(self.field, out)

    def scale(self, c):
        return Poly(self.field, [a * c for a in self.coeffs])

    def __divmod__(self, other):
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree()
        inv_lead = other.leading().inverse()
        q = [self.field.zero] * max(len(rem) - db, 0)
        while len(rem) - 1 >= db:
            if not rem[-1]:
                rem.pop()
                continue
            da = len(rem) - 1
            coef = rem[-1] * inv_lead
            q[da - db] = coef
            for j in range(db + 1):
                rem[da - db + j] = rem[da - db + j] - coef * other.coeffs[j]
            rem.pop()
        return Poly(self.field, q), Poly(self.field, rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.one(self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def monic(self):
        if self.is_zero():
            return self
        return self.scale(self.leading().inverse())

    def gcd(self, other):
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def derivative(self):
        out = []
        for i in range(1, len(self.coeffs)):
            out.append(self.coeffs[i].scale(i))
        return Poly(self.field, out)

    def eval(self, x):
        """Evaluate at x, an element of the coefficient field."""
        acc = self.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_in(self, x, coeff_map):
        """Evaluate at x living in another field; coeff_map sends coefficients there."""
        acc = x.field.zero
        for c in reversed(self.coeffs):
            acc = acc * x + coeff_map(c)
        return acc

    def map_coeffs(self, coeff_map, new_field):
        return Poly(new_field, [coeff_map(c) for c in self.coeffs])

    def taylor_shift(self, a):
        """Coefficients of self(u + a) as a polynomial in u."""
        F = self.field
        result = Poly.zero(F)
        shift = Poly(F, (a, F.one))
        for c in reversed(self.coeffs):
            result = result * shift + Poly.const(c)
        return result

    def reversed_coeffs(self):
        """t^deg * self(1/t); drops nothing since trailing zeros stay explicit."""
        return Poly(self.field, tuple(reversed(self.coeffs)))

    def frobenius_coeffs(self, times=1):
        return Poly(self.field, [c.frobenius(times) for c in self.coeffs])

    def pth_power_root(self):
        """p-th root of a polynomial in F_q[t^p]; None if there is none."""
        p = self.field.p
        for i, c in enumerate(self.coeffs):
            if i % p and c:
                return None
        return Poly(self.field, [self.coeffs[i].pth_root() for i in range(0, len(self.coeffs), p)])

    def pth_power(self):
        """Frobenius: (sum c_i t^i)^p = sum c_i^p t^(i p)."""
        if self.is_zero():
            return self
        p = self.field.p
        out = [self.field.zero] * ((len(self.coeffs) - 1) * p + 1)
        for i, c in enumerate(self.coeffs):
            if c:
                out[i * p] = c.frobenius()
        return Poly(self.field, out)

    def key(self):
        return (id(self.field), tuple(c.index for c in self.coeffs))

    def index_value(self):
        """Integer encoding of the coefficient vector, base q, c0 least significant."""
        v = 0
        for c in reversed(self.coeffs):
            v = v * self.field.q + c.index
        return v

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.field is other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return poly_to_str(self)


def _poly_extgcd(a, b):
    """(g, s) with s*a = g mod b, g monic gcd; enough for modular inverses."""
    F = a.field
    r0, r1 = a, b
    s0, s1 = Poly.one(F), Poly.zero(F)
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
    if r0.is_zero():
        raise ZeroInput("gcd of zero polynomials")
    c = r0.leading().inverse()
    return r0.scale(c), s0.scale(c)


def poly_inverse_mod(a, m):
    g, s = _poly_extgcd(a % m, m)
    if g.degree() != 0:
        raise ZeroInput(f"{a} is not invertible mod {m}")
    return s % m


def poly_powmod(base, e, mod):
    result = Poly.one(base.field)
    base = base % mod
    while e:
        if e & 1:
            result = (result * base) % mod
        base = (base * base) % mod
        e >>= 1
    return result


def poly_is_irreducible(f):
    """Rabin test over the coefficient field F_q."""
    n = f.degree()
    if n < 1:
        return False
    q = f.field.q
    x = Poly.x(f.field)
    t = x
    for _ in range(n):
        t = poly_powmod(t, q, f)
    if not (t - x) % f == Poly.zero(f.field):
        return False
    for ell in _prime_factors(n):
        t = x
        for _ in range(n // ell):
            t = poly_powmod(t, q, f)
        g = f.gcd(t - x)
        if g.degree() != 0:
            return False
    return True


_MONIC_IRRED_CACHE = {}


def monic_polys(field, degree):
    """All monic polynomials of the given degree, in index order."""
    if degree < 0:
        return
    q = field.q
    for v in range(q ** degree):
        coeffs = []
        t = v
        for _ in range(degree):
            coeffs.append(field.elem_by_index(t % q))
            t //= q
        coeffs.append(field.one)
        yield Poly(field, coeffs)


def irreducible_polys(field, degree):
    """Monic irreducibles of exactly the given degree, in index order, cached."""
    key = (id(field), degree)
    cached = _MONIC_IRRED_CACHE.get(key)
    if cached is None:
        cached = tuple(f for f in monic_polys(field, degree) if poly_is_irreducible(f))
        _MONIC_IRRED_CACHE[key] = cached
    return cached


def count_irreducibles(q, degree):
    """Necklace count (1/d) sum_{e|d} mu(e) q^(d/e); independent of enumeration."""
    def mu(n):
        out, m = 1, n
        for ell in _prime_factors(n):
            if m % (ell * ell) == 0:
                return 0
            out = -out
        return out

    total = 0
    for e in range(1, degree + 1):
        if degree % e == 0:
            total += mu(e) * q ** (degree // e)
    return total // degree


def factor_poly(f):
    """Monic irreducible factorization by ordered trial division.

    Returns (unit, [(pi, exponent), ...]).  Trial divisors of degree d are
    only tried while 2d <= deg(rem); once 2d exceeds it the remainder has no
    factor of degree < d left and is itself irreducible.
    """
    if f.is_zero():
        raise ZeroInput("factorization of zero")
    unit = f.leading()
    rem = f.monic()
    out = []
    d = 1
    while rem.degree() >= 1:
        if 2 * d > rem.degree():
            out.append((rem, 1))
            break
        for pi in irreducible_polys(f.field, d):
            if 2 * d > rem.degree():
                break
            e = 0
            while True:
                q, r = divmod(rem, pi)
                if r.is_zero():
                    rem = q
                    e += 1
                else:
                    break
            if e:
                out.append((pi, e))
        d += 1
    out.sort(key=lambda fe: (fe[0].degree(), fe[0].index_value()))
    return unit, out


# ---------------------------------------------------------------------------
# the rational function field
# ---------------------------------------------------------------------------

_RFF_CACHE = {}


class RatFuncField:
    """F_q(t) for a fixed coefficient field; one interned object per base."""

    __slots__ = ("base", "p", "q", "zero", "one", "t", "__weakref__")

    def __init__(self, base):
        self.base = base
        self.p = base.p
        self.q = base.q
        self.zero = RatFunc(self, Poly.zero(base), Poly.one(base))
        self.one = RatFunc(self, Poly.one(base), Poly.one(base))
        self.t = RatFunc(self, Poly.x(base), Poly.one(base))

    def from_poly(self, num):
        return RatFunc(self, num, Poly.one(self.base))

    def from_const(self, c):
        return self.from_poly(Poly.const(c))

    def from_int(self, c):
        return self.from_const(self.base.from_int(c))

    def __repr__(self):
        return f"F_{self.q}(t)"


def make_ratfunc_field(base):
    key = id(base)
    cached = _RFF_CACHE.get(key)
    if cached is None:
        cached = RatFuncField(base)
        _RFF_CACHE[key] = cached
    return cached


class RatFunc:
    """num/den in lowest terms, den monic; zero is 0/1."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field, num, den, reduce=True):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if reduce:
            if num.is_zero():
                den = Poly.one(field.base)
            else:
                g = num.gcd(den)
                if g.degree() > 0:
                    num = num // g
                    den = den // g
                lc = den.leading()
                if lc != field.base.one:
                    inv = lc.inverse()
                    num = num.scale(inv)
                    den = den.scale(inv)
        self.field = field
        self.num = num
        self.den = den

    def _check(self, other):
        if not isinstance(other, RatFunc):
            raise TypeError(f"expected RatFunc, got {type(other).__name__}")
        if other.field is not self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_one()

    def constant_value(self):
        if not self.is_constant():
            raise ZeroInput(f"{self} is not constant")
        return self.num.constant_coeff()

    def is_poly(self):
        return self.den.is_one()

    def __add__(self, other):
        self._check(other)
        return RatFunc(self.field, self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other):
        self._check(other)
        return RatFunc(self.field, self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self):
        return RatFunc(self.field, -self.num, self.den, reduce=False)

    def __mul__(self, other):
        if isinstance(other, int):
            return RatFunc(self.field, self.num.scale(self.field.base.from_int(other)), self.den)
        self._check(other)
        return RatFunc(self.field, self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.field, self.num * other.den, self.den * other.num)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.field, self.den, self.num)

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return RatFunc(self.field, self.num ** e, self.den ** e, reduce=False)

    def derivative(self):
        n = self.num.derivative() * self.den - self.num * self.den.derivative()
        return RatFunc(self.field, n, self.den * self.den)

    def dlog_func(self):
        """f'/f as a rational function."""
        if self.is_zero():
            raise ZeroInput("dlog of zero")
        return self.derivative() / self

    def frobenius_coeffs(self, times=1):
        return RatFunc(
            self.field,
            self.num.frobenius_coeffs(times),
            self.den.frobenius_coeffs(times),
            reduce=False,
        )

    def pth_power(self):
        return RatFunc(self.field, self.num.pth_power(), self.den.pth_power(), reduce=False)

    def is_pth_power(self):
        return self.num.derivative().is_zero() and self.den.derivative().is_zero()

    def pth_root(self):
        rn = self.num.pth_power_root()
        rd = self.den.pth_power_root()
        if rn is None or rd is None:
            raise ZeroInput(f"{self} is not a p-th power")
        return RatFunc(self.field, rn, rd)

    def map_coeffs(self, coeff_map, new_rff):
        return RatFunc(
            new_rff,
            self.num.map_coeffs(coeff_map, new_rff.base),
            self.den.map_coeffs(coeff_map, new_rff.base),
        )

    def key(self):
        return (self.num.key(), self.den.key())

    def sort_key(self):
        return (self.den.index_value(), self.num.index_value())

    def __eq__(self, other):
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.field is other.field and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return ratfunc_to_str(self)


# ---------------------------------------------------------------------------
# places
# ---------------------------------------------------------------------------

class Place:
    """A closed point of P^1 over the base field: monic irreducible or infinity."""

    __slots__ = ("rff", "poly", "degree", "_res")

    def __init__(self, rff, poly):
        self.rff = rff
        self.poly = poly
        self.degree = 1 if poly is None else poly.degree()
        self._res = None

    @staticmethod
    def finite(rff, poly):
        if not poly.is_monic() or not poly_is_irreducible(poly):
            raise NotIrreducible(f"{poly} is not monic irreducible")
        return _intern_place(rff, poly)

    @staticmethod
    def infinite(rff):
        return _intern_place(rff, None)

    @property
    def is_infinite(self):
        return self.poly is None

    def residue_data(self):
        """(residue field, embedding of the base, root of the place polynomial)."""
        if self._res is None:
            base = self.rff.base
            if self.is_infinite or self.degree == 1:
                if self.is_infinite:
                    theta = None
                else:
                    theta = -self.poly.constant_coeff()
                self._res = (base, embed(base, base), theta)
            else:
                rf = make_field(base.p, base.k * self.degree)
                emb = embed(base, rf)
                theta = None
                for cand in rf.elements():
                    if not self.poly.eval_in(cand, emb):
                        theta = cand
                        break
                if theta is None:  # pragma: no cover
                    raise NotIrreducible(f"no root of {self.poly} in {rf}")
                self._res = (rf, emb, theta)
        return self._res

    @property
    def residue_field(self):
        return self.residue_data()[0]

    def sort_key(self):
        if self.is_infinite:
            return (self.degree, 1, ())
        return (self.degree, 0, tuple(c.index for c in self.poly.coeffs))

    def __eq__(self, other):
        if not isinstance(other, Place):
            return NotImplemented
        return self.rff is other.rff and self.poly == other.poly

    def __hash__(self):
        return hash((id(self.rff), None if self.poly is None else self.poly.key()))

    def __repr__(self):
        return place_to_str(self)


_PLACE_CACHE = {}


def _intern_place(rff, poly):
    key = (id(rff), None if poly is None else poly.key())
    cached = _PLACE_CACHE.get(key)
    if cached is None:
        cached = Place(rff, poly)
        _PLACE_CACHE[key] = cached
    return cached


def enumerate_places(rff, max_degree):
    """Places of degree <= max_degree: by degree, finite before infinity at degree one."""
    out = []
    for d in range(1, max_degree + 1):
        for pi in irreducible_polys(rff.base, d):
            out.append(Place.finite(rff, pi))
        if d == 1:
            out.append(Place.infinite(rff))
    out.sort(key=lambda v: v.sort_key())
    return out


def _poly_val(f, pi):
    """Multiplicity of pi in f (f nonzero)."""
    v = 0
    while True:
        q, r = divmod(f, pi)
        if r.is_zero():
            f = q
            v += 1
        else:
            return v, f


def valuation(f, place):
    if f.is_zero():
        raise ZeroInput("valuation of zero")
    if place.is_infinite:
        return f.den.degree() - f.num.degree()
    vn, _ = _poly_val(f.num, place.poly)
    vd, _ = _poly_val(f.den, place.poly)
    return vn - vd


def residue_class(f, place):
    """Image of f in the residue field, defined when v(f) >= 0."""
    if f.is_zero():
        return place.residue_field.zero
    rf, emb, theta = place.residue_data()
    if place.is_infinite:
        dn, dd = f.num.degree(), f.den.degree()
        if dn > dd:
            raise PoleAtPlace(f"{f} has a pole at infinity")
        if dn < dd:
            return rf.zero
        return f.num.leading() / f.den.leading()
    vn, n0 = _poly_val(f.num, place.poly)
    vd, d0 = _poly_val(f.den, place.poly)
    if vn < vd:
        raise PoleAtPlace(f"{f} has a pole at {place}")
    if vn > vd:
        return rf.zero
    return n0.eval_in(theta, emb) / d0.eval_in(theta, emb)


class LaurentJet:
    """Finitely many leading Laurent coefficients at a place.

    Coefficients live in the residue field and index exponents lead,
    lead+1, ..., lead+len(coeffs)-1 of the local uniformizer (t - theta at a
    finite place, 1/t at infinity).
    """

    __slots__ = ("place", "lead", "coeffs")

    def __init__(self, place, lead, coeffs):
        self.place = place
        self.lead = lead
        self.coeffs = tuple(coeffs)

    @property
    def truncation(self):
        return self.lead + len(self.coeffs)

    def coeff(self, i):
        if i < self.lead:
            return self.place.residue_field.zero
        if i >= self.truncation:
            raise InsufficientPrecision(f"jet truncated at exponent {self.truncation}, need {i}")
        return self.coeffs[i - self.lead]

    def __repr__(self):
        rf = self.place.residue_field
        parts = []
        for i, c in enumerate(self.coeffs):
            if c:
                parts.append(f"{elem_to_str(c)}*u^{self.lead + i}")
        body = " + ".join(parts) if parts else "0"
        return f"Jet[{body} + O(u^{self.truncation}) at {self.place}]"


def _series_div(num_coeffs, den_coeffs, n, zero):
    """First n coefficients of num/den as power series; den[0] must be a unit."""
    inv0 = den_coeffs[0].inverse()
    out = []
    for i in range(n):
        acc = num_coeffs[i] if i < len(num_coeffs) else zero
        for j in range(1, min(i, len(den_coeffs) - 1) + 1):
            acc = acc - den_coeffs[j] * out[i - j]
        out.append(acc * inv0)
    return out


def laurent_expand(f, place, n_terms):
    """Jet of f at the place with n_terms coefficients starting at v(f)."""
    if n_terms < 0:
        raise InsufficientPrecision("negative precision")
    if f.is_zero():
        raise ZeroInput("expansion of zero")
    rf, emb, theta = place.residue_data()
    if place.is_infinite:
        nn = f.num.reversed_coeffs()
        dd = f.den.reversed_coeffs()
        shift = f.den.degree() - f.num.degree()
        n_loc, d_loc = nn, dd
    else:
        if place.degree == 1 and rf is place.rff.base:
            n_loc = f.num.taylor_shift(theta)
            d_loc = f.den.taylor_shift(theta)
        else:
            n_loc = f.num.map_coeffs(emb, rf).taylor_shift(theta)
            d_loc = f.den.map_coeffs(emb, rf).taylor_shift(theta)
        shift = 0

    def strip(pc):
        v = 0
        cs = pc.coeffs
        while v < len(cs) and not cs[v]:
            v += 1
        return v, cs[v:]

    vn, ncs = strip(n_loc)
    vd, dcs = strip(d_loc)
    lead = vn - vd + shift
    series = _series_div(ncs, dcs, n_terms, rf.zero)
    return LaurentJet(place, lead, series)


def residue_of_form(g, place, min_terms=None):
    """Residue at the place of the differential g dt, in the residue field.

    Finite place: coefficient of u^(-1) in the expansion of g with u = t - theta.
    Infinity: dt = -u^(-2) du with u = 1/t, so the residue is minus the
    coefficient of u^1 in g(1/u).  The expansion length is chosen to cover
    the pole order exactly; min_terms only raises that floor.
    """
    if g.is_zero():
        return place.residue_field.zero
    target = 1 if place.is_infinite else -1
    v = valuation(g, place)
    if v > target:
        return place.residue_field.zero
    jet = laurent_expand(g, place, max(target - v + 1, min_terms or 0))
    c = jet.coeff(target)
    return -c if place.is_infinite else c


def places_of_support(f, include_infinity=True):
    """Places where f has a zero or pole, in sort order."""
    if f.is_zero():
        raise ZeroInput("support of zero")
    rff = f.field
    out = {}
    for poly in (f.num, f.den):
        if poly.degree() >= 1:
            _, facs = factor_poly(poly)
            for pi, _e in facs:
                pl = _intern_place(rff, pi)
                out[pl] = True
    if include_infinity and f.num.degree() != f.den.degree():
        out[Place.infinite(rff)] = True
    return sorted(out, key=lambda v: v.sort_key())


def partial_fractions(f):
    """Split f as (polynomial part, [(c, pi, j), ...]) with f = P + sum c/pi^j.

    Each c is a polynomial of degree < deg(pi); terms are ordered by place
    then ascending j.
    """
    rff = f.field
    if f.is_zero():
        return Poly.zero(rff.base), []
    _, facs = factor_poly(f.den)
    terms = []
    correction = Poly.zero(rff.base)
    den = f.den
    for pi, e in facs:
        pie = pi ** e
        co = den // pie
        a_i = (f.num * poly_inverse_mod(co, pie)) % pie
        correction = correction + a_i * co
        cur = a_i
        digits = []
        for _ in range(e):
            cur, r0 = divmod(cur, pi)
            digits.append(r0)
        for j, dg in enumerate(digits):
            if not dg.is_zero():
                terms.append((dg, pi, e - j))
    ppart, r = divmod(f.num - correction, den)
    if not r.is_zero():  # pragma: no cover - exact by construction
        raise ZeroInput("partial fraction split failed")
    terms.sort(key=lambda term: (term[1].index_value(), -term[2]))
    return ppart, terms


# ---------------------------------------------------------------------------
# wire format
# ---------------------------------------------------------------------------

def poly_to_str(f):
    if f.is_zero():
        return "0"
    parts = []
    for i in range(f.degree(), -1, -1):
        c = f.coeffs[i]
        if not c:
            continue
        if i == 0:
            parts.append(elem_to_str(c))
        else:
            tpow = "t" if i == 1 else f"t^{i}"
            if c == f.field.one:
                parts.append(tpow)
            else:
                parts.append(f"{elem_to_str(c)}*{tpow}")
    return "+".join(parts)


def ratfunc_to_str(f):
    if f.is_zero():
        return "0"
    ns = poly_to_str(f.num)
    if f.den.is_one():
        return ns
    ds = poly_to_str(f.den)
    if f.num.degree() > 0 or len(f.num.coeffs) > 1:
        ns = f"({ns})"
    if f.den.degree() > 0:
        ds = f"({ds})"
    return f"{ns}/{ds}"


def place_to_str(v):
    if v.is_infinite:
        return "inf"
    return f"({poly_to_str(v.poly)})"


def _split_top(text, seps):
    """Split on separators at bracket depth zero; yields (piece, sep_before)."""
    parts = []
    depth = 0
    cur = []
    sign = "+"
    for ch in text:
        if ch in "(⟨":
            depth += 1
        elif ch in ")⟩":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced brackets in {text!r}")
        if depth == 0 and ch in seps:
            parts.append(("".join(cur), sign))
            cur = []
            sign = ch
        else:
            cur.append(ch)
    parts.append(("".join(cur), sign))
    if depth != 0:
        raise ParseError(f"unbalanced brackets in {text!r}")
    return parts


def parse_poly(text, field):
    """Parse sparse polynomial syntax like 1+t^2, 2*t^3+t, <0,1>*t+1."""
    t = text.strip().replace(" ", "")
    if not t:
        raise ParseError("empty polynomial")
    if t.startswith("(") and t.endswith(")") and _balanced(t[1:-1]):
        t = t[1:-1]
    coeffs = {}
    first = True
    for piece, sign in _split_top(t, "+-"):
        if piece == "" and first:
            first = False
            continue
        first = False
        if piece == "":
            raise ParseError(f"dangling sign in {text!r}")
        factors = piece.split("*")
        coeff = None
        exp = 0
        for fac in factors:
            if fac.startswith("t"):
                if fac == "t":
                    exp += 1
                elif fac.startswith("t^"):
                    try:
                        exp += int(fac[2:])
                    except ValueError as e:
                        raise ParseError(f"bad exponent in {piece!r}") from e
                else:
                    raise ParseError(f"bad factor {fac!r}")
            else:
                c = parse_elem(fac, field)
                coeff = c if coeff is None else coeff * c
        if coeff is None:
            coeff = field.one
        if sign == "-":
            coeff = -coeff
        key = exp
        coeffs[key] = coeffs.get(key, field.zero) + coeff
    deg = max(coeffs) if coeffs else 0
    out = [field.zero] * (deg + 1)
    for e, c in coeffs.items():
        out[e] = c
    return Poly(field, out)


def _balanced(s):
    depth = 0
    for ch in s:
        if ch in "(⟨":
            depth += 1
        elif ch in ")⟩":
            depth -= 1
            if depth < 0:
                return False
    return depth == 0


def parse_ratfunc(text, rff):
    t = text.strip().replace(" ", "")
    pieces = _split_top(t, "/")
    if len(pieces) == 1:
        return rff.from_poly(parse_poly(t, rff.base))
    if len(pieces) != 2:
        raise ParseError(f"expected num/den: {text!r}")
    num = parse_poly(pieces[0][0], rff.base)
    den = parse_poly(pieces[1][0], rff.base)
    if den.is_zero():
        raise ParseError("zero denominator")
    return RatFunc(rff, num, den)


def parse_place(text, rff):
    t = text.strip()
    if t in ("inf", "infty", "infinity", "∞"):
        return Place.infinite(rff)
    if t.startswith("(") and t.endswith(")"):
        t = t[1:-1]
    pi = parse_poly(t, rff.base)
    return Place.finite(rff, pi)
