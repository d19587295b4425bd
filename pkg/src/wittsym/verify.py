"""Named verification suites shared by the command-line driver and the tests.

Each suite takes a RunConfig and returns a deterministic report dict --
no timestamps, no machine state, iteration orders fixed -- so the same
config and seed reproduce the same bytes.  The acceptance tests run the
same functions the CLI runs.

Suites:
  witt-ring        exhaustive ring axioms on W_r(F_q) for q^r <= 256 and
                   ghost-oracle consistency for r <= 3
  wp-cokernel      |W_r(F_q)/(F-1)| = p^r over p in {2,3}, r,k in {1,2,3}
  weil             reciprocity for random and exhaustive monic-linear
                   weight-2 symbols over F_2(t) and F_3(t)
  cartier          Cartier inverse identity, constructive ker C = im d,
                   and (C^{-1} - 1)-surjectivity on the bounded filtration
  relations        defining relations and projection-formula instances
                   map to zero under invariant vectors / extended symbols
  kato-complex     the four residue-complex assertions on the target configs
  hbn              reciprocity sums and the truncated injectivity probe
  mackey-vanishing (W_r (x) G_m)(F_q) = 0 at lattice bound 4
  dlog             dlog-kernel pth-power test and route equality of
                   invariant vectors
  determinism      a randomized suite rerun byte-identically, and verdict
                   stability across seeds
"""

import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from .complexes import verify_finite_theorem
from .config import MAX_WITT_LENGTH, RunConfig
from .errors import ConfigError, NoPreimage, WildAtPlace
from .fields import field_of_order, make_field
from .forms import (
    DiffForm,
    _bounded_functions,
    antiderivative,
    cartier,
    d,
    dlog,
    form_residue_invariant,
    inv_cartier,
    wp_surjective_on_Binf,
)
from .funcfield import Poly, RatFunc, make_ratfunc_field, monic_polys, place_to_str
from .kato import (
    KatoSymbol,
    _witt_pool,
    hbn_check,
    invariant_vector,
    relation_instances,
    symbol_support,
    weight2_residues_vanish,
)
from .mackey import FieldLattice, extended_symbol_invariants, mackey_group, pf_instances
from .milnor import MilnorSymbol, dlog_kernel_check, weil_check
from .witt import (
    WittVector,
    coker_wp,
    enumerate_witt_vectors,
    teichmuller,
    witt_index,
    witt_int_op_via_ghost,
    witt_op_tables,
    witt_polys,
)

SCHEMA = "kato-symbol/1"

COMPLEX_CONFIGS = ((2, 1, 2), (2, 2, 2), (3, 1, 1), (4, 1, 1))


def _check(name, passed, **extra):
    out = {"name": name, "pass": bool(passed)}
    out.update(extra)
    return out


def _suite_report(name, checks):
    return {"suite": name, "pass": all(c["pass"] for c in checks), "checks": checks}


def _rng(cfg, tag):
    return random.Random(f"{cfg.seed}:{tag}")


def _rand_poly(rng, base, degree):
    return Poly(base, tuple(base.elem_by_index(rng.randrange(base.q))
                            for _ in range(degree + 1)))


def _rand_monic(rng, base, max_degree):
    deg = rng.randrange(max_degree + 1)
    return Poly(base, tuple(base.elem_by_index(rng.randrange(base.q))
                            for _ in range(deg)) + (base.one,))


def _rand_ratfunc(rng, rff, degree, nonzero=True):
    """Random num/den with both degrees <= the bound and a monic denominator."""
    base = rff.base
    while True:
        num = _rand_poly(rng, base, degree)
        if not num.is_zero() or not nonzero:
            break
    return RatFunc(rff, num, _rand_monic(rng, base, degree))


# ---------------------------------------------------------------------------
# witt-ring
# ---------------------------------------------------------------------------

def _ring_axioms_exhaustive(field, r):
    """All axioms by table lookup: pairs and triples over every element."""
    add_t, mul_t, neg_t = witt_op_tables(field, r)
    n = field.q ** r
    idx = np.arange(n)
    zero_i = witt_index(WittVector.zero(field, r))
    one_i = witt_index(teichmuller(field.one, r))
    ok = bool((add_t == add_t.T).all() and (mul_t == mul_t.T).all()
              and (add_t[zero_i] == idx).all()
              and (mul_t[one_i] == idx).all()
              and (mul_t[zero_i] == zero_i).all()
              and (add_t[idx, neg_t] == zero_i).all())
    witness = None
    if ok:
        for a in range(n):
            row_a, rowm_a = add_t[a], mul_t[a]
            if not (np.array_equal(add_t[row_a], row_a[add_t])
                    and np.array_equal(mul_t[rowm_a], rowm_a[mul_t])
                    and np.array_equal(rowm_a[add_t],
                                       add_t[rowm_a[:, None], rowm_a[None, :]])):
                ok, witness = False, f"triple law fails at element {a}"
                break
    return ok, witness


def _ghost_oracle_exhaustive(p, r):
    """Structure-polynomial tables against the integer ghost oracle."""
    field = make_field(p)
    add_t, mul_t, neg_t = witt_op_tables(field, r)
    vecs = list(enumerate_witt_vectors(field, r))
    lifts = [tuple(e.index for e in x.entries) for x in vecs]
    idxs = [witt_index(x) for x in vecs]
    pairs = 0
    for i, xs in enumerate(lifts):
        want_neg = tuple(c % p for c in witt_int_op_via_ghost(p, "neg", list(xs)))
        if lifts[neg_t[idxs[i]]] != want_neg:
            return False, pairs
        for j, ys in enumerate(lifts):
            want_add = tuple(c % p for c in witt_int_op_via_ghost(p, "add", list(xs), list(ys)))
            want_mul = tuple(c % p for c in witt_int_op_via_ghost(p, "mul", list(xs), list(ys)))
            if lifts[add_t[idxs[i], idxs[j]]] != want_add:
                return False, pairs
            if lifts[mul_t[idxs[i], idxs[j]]] != want_mul:
                return False, pairs
            pairs += 1
    return True, pairs


def suite_witt_ring(cfg):
    checks = []
    for p in (2, 3, 5, 7):
        for k in (1, 2, 3):
            q = p ** k
            for r in range(1, MAX_WITT_LENGTH + 1):
                if q ** r > 256:
                    continue
                ok, witness = _ring_axioms_exhaustive(make_field(p, k), r)
                extra = {"elements": q ** r}
                if witness:
                    extra["witness"] = witness
                checks.append(_check(f"ring-axioms W_{r}(F_{q})", ok, **extra))
    for p in (2, 3, 5):
        for r in (1, 2, 3):
            witt_polys(p, r)  # builds with the symbolic ghost identity verified
            ok, pairs = _ghost_oracle_exhaustive(p, r)
            checks.append(_check(f"ghost-oracle W_{r}(F_{p})", ok, pairs=pairs))
    return _suite_report("witt-ring", checks)


# ---------------------------------------------------------------------------
# wp-cokernel
# ---------------------------------------------------------------------------

def suite_wp_cokernel(cfg):
    checks = []
    for p in (2, 3):
        for r in (1, 2, 3):
            for k in (1, 2, 3):
                coker = coker_wp(make_field(p, k), r)
                checks.append(_check(
                    f"coker-wp F_{p ** k} r={r}", coker.order == p ** r,
                    order=coker.order,
                    invariant_factors=list(coker.presentation.invariant_factors())))
    return _suite_report("wp-cokernel", checks)


# ---------------------------------------------------------------------------
# weil
# ---------------------------------------------------------------------------

def suite_weil(cfg):
    checks = []
    for p in (2, 3):
        base = make_field(p)
        rff = make_ratfunc_field(base)
        rng = _rng(cfg, f"weil:{p}")
        failures = 0
        n_samples = 200
        for _ in range(n_samples):
            f = _rand_ratfunc(rng, rff, 4)
            g = _rand_ratfunc(rng, rff, 4)
            if not weil_check(MilnorSymbol.of((f, g)), 4).ok:
                failures += 1
        checks.append(_check(f"weil-random F_{p}(t)", failures == 0,
                             samples=n_samples, failures=failures))
        linear = [rff.from_poly(m) for m in monic_polys(base, 1)]
        lin_fail = sum(not weil_check(MilnorSymbol.of((x, y)), 1).ok
                       for x in linear for y in linear)
        checks.append(_check(f"weil-linear-exhaustive F_{p}(t)", lin_fail == 0,
                             pairs=len(linear) ** 2))
    return _suite_report("weil", checks)


# ---------------------------------------------------------------------------
# cartier
# ---------------------------------------------------------------------------

def suite_cartier(cfg):
    checks = []
    for p in (2, 3):
        base = make_field(p)
        rff = make_ratfunc_field(base)
        pool = [DiffForm(rff, 1, f) for f in _bounded_functions(rff, 4)]

        bad = next((str(om.coeff) for om in pool
                    if cartier(inv_cartier(om)) != om), None)
        checks.append(_check(f"cartier-inverse-identity F_{p}(t)", bad is None,
                             pool=len(pool), **({"witness": bad} if bad else {})))

        bad = next((str(om.coeff) for om in pool
                    if not cartier(d(om.coeff)).is_zero()), None)
        checks.append(_check(f"cartier-kills-derivatives F_{p}(t)", bad is None,
                             pool=len(pool), **({"witness": bad} if bad else {})))

        n_exact = 0
        bad = None
        for om in pool:
            if not cartier(om).is_zero():
                continue
            n_exact += 1
            try:
                if d(antiderivative(om)) != om:
                    bad = str(om.coeff)
            except NoPreimage:
                bad = str(om.coeff)
            if bad:
                break
        checks.append(_check(f"cartier-kernel-integrates F_{p}(t)", bad is None,
                             exact_forms=n_exact, **({"witness": bad} if bad else {})))

        ok, n_checked = wp_surjective_on_Binf(base, 3, 4)
        checks.append(_check(f"wp-surjective-Binf F_{p}(t) L=3 D=4", ok,
                             verified=n_checked))
    return _suite_report("cartier", checks)


# ---------------------------------------------------------------------------
# relations
# ---------------------------------------------------------------------------

def suite_relations(cfg):
    checks = []
    base = make_field(2)
    rff = make_ratfunc_field(base)
    t = rff.t
    unit_pool = [rff.one, t, t + rff.one, t * t + t + rff.one]

    for r in (1, 2):
        witt_pool = list(_witt_pool(rff, r, 1))
        for n in (1, 2):
            insts = relation_instances(witt_pool, unit_pool, n, r)
            n_checked = n_skipped = 0
            bad = None
            for kind, expr in insts:
                try:
                    if n == 1:
                        ok = invariant_vector(expr).is_zero()
                    else:
                        ok = weight2_residues_vanish(expr)
                except WildAtPlace:
                    n_skipped += 1
                    continue
                n_checked += 1
                if not ok:
                    bad = f"{kind}: {expr[0]!r}"
                    break
            checks.append(_check(
                f"defining-relations n={n} r={r}", bad is None and n_checked > 0,
                checked=n_checked, wild_skipped=n_skipped,
                **({"witness": bad} if bad else {})))

    for r in (1, 2):
        lat = FieldLattice(rff, 2)
        n_checked = 0
        bad = None
        for kind, low, high, s_low, s_high in pf_instances(lat, 1, r):
            if extended_symbol_invariants(s_low) != extended_symbol_invariants(s_high):
                bad = f"{kind} {low}->{high}"
                break
            n_checked += 1
        checks.append(_check(
            f"pf-extended-symbol r={r}", bad is None and n_checked > 0,
            checked=n_checked, **({"witness": bad} if bad else {})))

        lat_fin = FieldLattice(base, 2)
        group = mackey_group(lat_fin, 1, r)
        n_fin = 0
        bad = None
        for kind, low, high, s_low, s_high in pf_instances(lat_fin, 1, r):
            if not group.is_zero_class([s_low, -s_high]):
                bad = f"{kind} {low}->{high}"
                break
            n_fin += 1
        checks.append(_check(
            f"pf-finite-truncation r={r}", bad is None and n_fin > 0,
            checked=n_fin, **({"witness": bad} if bad else {})))
    return _suite_report("relations", checks)


# ---------------------------------------------------------------------------
# kato-complex
# ---------------------------------------------------------------------------

def suite_kato_complex(cfg):
    checks = []
    for q, r, D in COMPLEX_CONFIGS:
        rep = verify_finite_theorem(q, r, D)
        for ch in rep["checks"]:
            entry = dict(ch)
            entry["name"] = f"({q},{r},{D}) {ch['name']}"
            checks.append(entry)
        checks.append(_check(f"({q},{r},{D}) kh0-factors",
                             rep["kh0"]["order"] == rep["params"]["p"] ** r,
                             kh0=rep["kh0"], pool_size=rep["pool_size"]))
    return _suite_report("kato-complex", checks)


# ---------------------------------------------------------------------------
# hbn
# ---------------------------------------------------------------------------

def suite_hbn(cfg):
    checks = []
    field = field_of_order(cfg.q)
    for r in (1, 2):
        rep = hbn_check(field, r, cfg.D, n_random=100, n_probe=20,
                        seed=cfg.seed * 1000 + r)
        checks.append(_check(
            f"hbn-sum-and-probe q={cfg.q} r={r}", rep.ok,
            tame=rep.n_tame, wild=rep.n_wild, probed=rep.n_probe,
            **({"witness": str(rep.failures[:3])} if rep.failures else {})))
    return _suite_report("hbn", checks)


# ---------------------------------------------------------------------------
# mackey-vanishing
# ---------------------------------------------------------------------------

def suite_mackey_vanishing(cfg):
    checks = []
    for q in (2, 3, 4):
        for r in (1, 2):
            lat = FieldLattice(field_of_order(q), 4)
            group = mackey_group(lat, 1, r)
            checks.append(_check(
                f"mackey-vanishing q={q} r={r} bound=4", group.order() == 1,
                order=group.order()))
    return _suite_report("mackey-vanishing", checks)


# ---------------------------------------------------------------------------
# dlog
# ---------------------------------------------------------------------------

def suite_dlog(cfg):
    checks = []
    checks.append(_check("dlog-kernel-exhaustive q=2 D=2", dlog_kernel_check(2, 2)))

    rff = make_ratfunc_field(make_field(2))
    rng = _rng(cfg, "dlog-routes")
    n_samples = 100
    bad = None
    for _ in range(n_samples):
        f = _rand_ratfunc(rng, rff, 2, nonzero=False)
        b = _rand_ratfunc(rng, rff, 2)
        sym = KatoSymbol(WittVector(rff, (f,)), (b,))
        iv = invariant_vector(sym)
        omega = dlog(b).scale(f)
        for v in symbol_support(sym):
            if form_residue_invariant(omega, v) != iv.value_at(v):
                bad = f"{sym!r} at {place_to_str(v)}"
                break
        if bad:
            break
    checks.append(_check("invariant-route-equality r=1", bad is None,
                         samples=n_samples, **({"witness": bad} if bad else {})))
    return _suite_report("dlog", checks)


# ---------------------------------------------------------------------------
# determinism
# ---------------------------------------------------------------------------

def suite_determinism(cfg):
    rep1 = suite_dlog(cfg)
    rep2 = suite_dlog(cfg)
    identical = json.dumps(rep1, sort_keys=True) == json.dumps(rep2, sort_keys=True)
    rep3 = suite_dlog(replace(cfg, seed=cfg.seed + 1))
    checks = [
        _check("same-seed-byte-identical", identical),
        _check("different-seed-verdicts-agree", rep1["pass"] == rep3["pass"]),
    ]
    return _suite_report("determinism", checks)


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

SUITES = {
    "witt-ring": suite_witt_ring,
    "wp-cokernel": suite_wp_cokernel,
    "weil": suite_weil,
    "cartier": suite_cartier,
    "relations": suite_relations,
    "kato-complex": suite_kato_complex,
    "hbn": suite_hbn,
    "mackey-vanishing": suite_mackey_vanishing,
    "dlog": suite_dlog,
    "determinism": suite_determinism,
}

SUITE_ORDER = tuple(SUITES)


def run_suite(name, cfg=None):
    cfg = (cfg or RunConfig()).validate()
    try:
        fn = SUITES[name]
    except KeyError:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITE_ORDER)} or all")
    return fn(cfg)


def run_suites(names, cfg=None):
    """Run the named suites (or all) and assemble one deterministic report."""
    cfg = (cfg or RunConfig()).validate()
    if isinstance(names, str):
        names = SUITE_ORDER if names == "all" else (names,)
    for name in names:
        if name not in SUITES:
            raise ConfigError(
                f"unknown suite {name!r}; choose from {', '.join(SUITE_ORDER)} or all")
    if cfg.jobs > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(lambda nm: SUITES[nm](cfg), names))
    else:
        results = [SUITES[nm](cfg) for nm in names]
    return {
        "schema": SCHEMA,
        "config": cfg.as_dict(),
        "suites": results,
        "pass": all(rep["pass"] for rep in results),
    }
