"""Kaehler differentials of a rational function field in characteristic p.

Degree-1 forms are coefficients against the basis dt, so a form is a single
rational function.  The module provides d, dlog, the Cartier operator and
its inverse, the exact-form filtration B_i computed by iterating C, the
additive map F - id realized as C^{-1} - id modulo exact forms, and the
degree-truncated description of the resulting cohomology classes by local
residue invariants.

Exactness has a single oracle: a degree-1 form is exact iff its Cartier
image vanishes.  Everything else is phrased through it.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .errors import NoPreimage, UnsupportedDegree, ZeroInput
from .fields import absolute_trace_int
from .funcfield import (Place, Poly, RatFunc, RatFuncField, enumerate_places,
                        parse_ratfunc, ratfunc_to_str, residue_of_form)
from .linalg import GroupPresentation


class DiffForm:
    """A differential form over F_q(t): degree 0 is a function, degree 1 is
    f*dt for a rational coefficient f.  Degree >= 2 vanishes identically
    since [F : F^p] = p."""

    __slots__ = ("ring", "degree", "coeff")

    def __init__(self, ring, degree, coeff):
        if degree not in (0, 1):
            raise UnsupportedDegree(f"forms of degree {degree} vanish here; use degree 0 or 1")
        if not isinstance(coeff, RatFunc):
            raise TypeError("coefficient must be a rational function")
        self.ring = ring
        self.degree = degree
        self.coeff = coeff

    def _check(self, other):
        if not isinstance(other, DiffForm):
            raise TypeError(f"expected DiffForm, got {type(other).__name__}")
        if other.ring is not self.ring or other.degree != self.degree:
            raise TypeError("form degree or base field mismatch")

    def __add__(self, other):
        self._check(other)
        return DiffForm(self.ring, self.degree, self.coeff + other.coeff)

    def __sub__(self, other):
        self._check(other)
        return DiffForm(self.ring, self.degree, self.coeff - other.coeff)

    def __neg__(self):
        return DiffForm(self.ring, self.degree, -self.coeff)

    def scale(self, f):
        return DiffForm(self.ring, self.degree, self.coeff * f)

    def is_zero(self):
        return self.coeff.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if not isinstance(other, DiffForm):
            return NotImplemented
        return (self.ring is other.ring and self.degree == other.degree
                and self.coeff == other.coeff)

    def __hash__(self):
        return hash((id(self.ring), self.degree, self.coeff.key()))

    def __repr__(self):
        return form_to_str(self)


def zero_form(rff, degree=1):
    return DiffForm(rff, degree, rff.zero)


def d(f):
    """Exterior derivative of a function: d(f) = f' dt."""
    if isinstance(f, DiffForm):
        if f.degree != 0:
            return zero_form(f.ring, 1)
        f = f.coeff
    return DiffForm(f.field, 1, f.derivative())


def dlog(b):
    """dlog(b) = (b'/b) dt for a nonzero function b."""
    if isinstance(b, DiffForm):
        b = b.coeff
    if b.is_zero():
        raise ZeroInput("dlog of zero")
    return DiffForm(b.field, 1, b.dlog_func())


_POW_CACHE = {}


def _cached_pow(poly, e):
    """poly ** e memoized by coefficient key; pool walks reuse denominators."""
    if e == 1:
        return poly
    key = (poly.key(), e)
    got = _POW_CACHE.get(key)
    if got is None:
        if len(_POW_CACHE) > 8192:
            _POW_CACHE.clear()
        got = poly ** e
        _POW_CACHE[key] = got
    return got


def cartier(omega):
    """The Cartier operator on f dt.

    Writing f = P / Q^p with Q the denominator of f and P = N * Q^(p-1),
    split P by exponent residue mod p; the digit at p-1 is a polynomial in
    t^p whose coefficientwise p-th root over Q gives C(f dt)."""
    if omega.degree != 1:
        raise UnsupportedDegree("Cartier acts on degree-1 forms")
    f = omega.coeff
    rff = omega.ring
    if f.is_zero():
        return zero_form(rff)
    p = rff.p
    base = rff.base
    den = f.den
    big = f.num * _cached_pow(den, p - 1)
    digit = [c for j, c in enumerate(big.coeffs) if j % p == p - 1]
    root = Poly(base, tuple(c.pth_root() for c in digit))
    return DiffForm(rff, 1, RatFunc(rff, root, den))


def inv_cartier(omega):
    """Canonical representative of the inverse Cartier operator:
    f dt = f t dlog t maps to (f t)^p dlog t = f^p t^(p-1) dt, and
    cartier(inv_cartier(omega)) == omega exactly."""
    if omega.degree != 1:
        raise UnsupportedDegree("inverse Cartier acts on degree-1 forms")
    rff = omega.ring
    p = rff.p
    f = omega.coeff
    if f.is_zero():
        return DiffForm(rff, 1, f)
    base = rff.base
    num, den = f.num.pth_power(), f.den.pth_power()
    # multiply by t^(p-1), cancelling directly against any t-power of the
    # denominator: num and den stay coprime, so no gcd pass is needed
    shift = p - 1
    dcs = den.coeffs
    drop = 0
    while drop < shift and drop < len(dcs) - 1 and not dcs[drop]:
        drop += 1
    num2 = Poly(base, (base.zero,) * (shift - drop) + tuple(num.coeffs))
    den2 = Poly(base, tuple(dcs[drop:]))
    return DiffForm(rff, 1, RatFunc(rff, num2, den2, reduce=False))


def is_exact(omega):
    """f dt is exact (equals d of a function) iff its Cartier image is 0."""
    return cartier(omega).is_zero()


def antiderivative(omega):
    """An explicit g with d(g) = omega, defined exactly when C(omega) = 0.

    In the splitting used by the Cartier operator, f = big / den^p with
    big = sum c_j t^j; a vanishing Cartier image means no exponent is
    p-1 mod p, so each term integrates to c_j t^(j+1) / ((j+1) den^p)
    termwise (den^p differentiates to zero).  Raises NoPreimage when the
    obstruction digit is nonzero; together with C(d(g)) = 0 this makes
    ker C = im d constructive in both directions."""
    if omega.degree != 1:
        raise UnsupportedDegree("antiderivatives of degree-1 forms only")
    rff = omega.ring
    f = omega.coeff
    if f.is_zero():
        return rff.zero
    p = rff.p
    base = rff.base
    den = f.den
    big = f.num * _cached_pow(den, p - 1)
    out = [base.zero] * (big.degree() + 2)
    for j, c in enumerate(big.coeffs):
        if not c:
            continue
        if j % p == p - 1:
            raise NoPreimage("nonzero Cartier image: the form is not exact")
        out[j + 1] = c / base.from_int(j + 1)
    return RatFunc(rff, Poly(base, tuple(out)), den.pth_power())


def wp_form(omega):
    """Representative of (C^{-1} - id)(omega); the class modulo exact forms
    is the well-defined object."""
    return inv_cartier(omega) - omega


@dataclass(frozen=True)
class BClass:
    """Position of a degree-1 form in the exact-form filtration.

    level i means the i-th Cartier iterate is the first to vanish (level 0
    is the zero form, level 1 the exact forms).  level None means the chain
    stayed nonzero through search_bound iterations; that is a statement
    about the bounded search only."""
    form: DiffForm
    level: int | None
    search_bound: int
    chain: tuple = dc_field(default=())

    @property
    def in_b_infinity(self):
        return self.level is not None


def b_level(omega, max_level):
    if max_level < 1:
        raise ValueError("max_level must be >= 1")
    chain = []
    cur = omega
    for i in range(max_level + 1):
        if cur.is_zero():
            return BClass(omega, i, max_level, tuple(chain))
        cur = cartier(cur)
        chain.append(cur)
    return BClass(omega, None, max_level, tuple(chain))


def wp_preimage_in_chain(omega, level_bound):
    """A form y with (C^{-1} - id)(y) congruent to omega modulo exact forms,
    valid whenever omega has finite filtration level <= level_bound.

    y = sum_{j=1}^{level-1} C^j(omega): applying C^{-1} - id telescopes to
    omega - C^{level-1}(omega), and the tail is exact by the level bound.
    Returns None if the level search fails."""
    bc = b_level(omega, level_bound)
    if bc.level is None:
        return None
    acc = zero_form(omega.ring)
    cur = omega
    for _ in range(1, max(bc.level, 1)):
        cur = cartier(cur)
        acc = acc + cur
    return acc


def wp_surjective_on_Binf(q_field, L, D):
    """Check that C^{-1} - id maps the bounded filtration onto itself modulo
    exact forms: every pool form of finite level <= L gets a verified
    preimage from the Cartier-chain construction.  Returns (ok, checked)."""
    from .funcfield import make_ratfunc_field
    rff = make_ratfunc_field(q_field)
    checked = 0
    for f in _bounded_functions(rff, D):
        omega = DiffForm(rff, 1, f)
        bc = b_level(omega, L)
        if bc.level is None or bc.level < 2:
            # level <= 1 is the zero class modulo exact forms
            continue
        y = wp_preimage_in_chain(omega, L)
        if y is None or not is_exact(wp_form(y) - omega):
            return False, checked
        checked += 1
    return True, checked


def _bounded_functions(rff, D):
    """All nonzero f = N/M with deg N <= D, M monic of degree <= D, coprime,
    in deterministic index order."""
    from .funcfield import monic_polys
    base = rff.base
    numerators = []
    for deg in range(D + 1):
        for m in monic_polys(base, deg):
            for c in base.elements():
                if c:
                    numerators.append(m.scale(c))
    denominators = [m for deg in range(D + 1) for m in monic_polys(base, deg)]
    for num in numerators:
        for den in denominators:
            if num.gcd(den).is_one():
                yield RatFunc(rff, num, den)


def form_residue_invariant(omega, place):
    """Local invariant of a degree-1 form: the absolute trace to F_p of its
    residue at the place, an element of Z/p."""
    return absolute_trace_int(residue_of_form(omega.coeff, place))


def form_invariant_vector(omega, max_degree):
    """Finitely supported map from places of degree <= max_degree (plus the
    infinite place) to Z/p given by trace-of-residue."""
    out = {}
    for place in enumerate_places(omega.ring, max_degree):
        val = form_residue_invariant(omega, place)
        if val:
            out[place] = val
    return out


class FormHGroup:
    """Degree-truncated description of coker(C^{-1} - id) on degree-1 forms.

    The genuine group is infinite, so classes are addressed by their local
    residue invariants at places of degree <= D: the presentation target is
    the direct sum of Z/p over those places, and class_invariants maps a
    form to its coordinate vector there.  Zero coordinates certify only
    truncated vanishing."""

    def __init__(self, rff, D):
        self.rff = rff
        self.D = D
        self.places = tuple(enumerate_places(rff, D))
        from .funcfield import place_to_str
        self.presentation = GroupPresentation(rff.p, 1, [place_to_str(v) for v in self.places])

    def class_invariants(self, omega):
        return [form_residue_invariant(omega, v) for v in self.places]

    def class_is_zero(self, omega):
        return not any(self.class_invariants(omega))

    def classes_equal(self, omega, eta):
        return self.class_invariants(omega) == self.class_invariants(eta)


def h_group_r1(q_field, n, D, function_field=True):
    """Mod-p cohomology cokernel at truncation.

    n = 1 over F_q(t): a FormHGroup addressing classes by local invariants.
    n >= 2, or any n >= 1 over the finite field itself: the zero group,
    returned as an empty presentation.  n < 1 is out of scope here (the
    degree-0 story is the Artin-Schreier cokernel in the Witt module)."""
    if n < 1:
        raise UnsupportedDegree("degree-0 cohomology lives in the Witt module")
    if n >= 2 or not function_field:
        return GroupPresentation(q_field.p, 1, [])
    from .funcfield import make_ratfunc_field
    return FormHGroup(make_ratfunc_field(q_field), D)


# ---------------------------------------------------------------------------
# wire format
# ---------------------------------------------------------------------------

def form_to_str(omega):
    if omega.degree == 0:
        return ratfunc_to_str(omega.coeff)
    return f"{ratfunc_to_str(omega.coeff)} * dt"


def parse_form(text, rff):
    t = text.strip()
    if t.endswith("dt"):
        body = t[:-2].rstrip()
        if body.endswith("*"):
            body = body[:-1].rstrip()
        if not body:
            body = "1"
        return DiffForm(rff, 1, parse_ratfunc(body, rff))
    return DiffForm(rff, 0, parse_ratfunc(t, rff))
