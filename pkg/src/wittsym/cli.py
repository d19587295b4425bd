"""Command-line driver: reproducible computations and machine-readable reports.

Subcommands
  witt-table     W_r(F_q) addition/multiplication/negation tables and the
                 structure of W_r(F_q)/(F-1)
  weil-check     reciprocity for randomly sampled weight-2 symbols
  invariants     local invariant vector of a weight-1 symbol over F_q(t)
  kh0            the truncated residue complex of the projective line and
                 its four homology assertions
  mackey-reduce  coordinates of a Mackey symbol in the truncated product
  verify         named property suites (or "all")

Shared flags: --p --q --r --n --D --L --seed --format --jobs --config FILE.
Config files hold key = value lines; explicit flags win.  Reports embed the
resolved configuration and a schema tag; identical config and seed give
byte-identical output.  Exit status 0 means every executed check passed,
1 means some check failed, 2 means the run could not start.
"""

import argparse
import csv
import json
import random
import sys

from .config import FORMATS, load_config_file, resolve_config
from .errors import ConfigError, ParseError, WittSymError
from .fields import field_of_order
from .funcfield import make_ratfunc_field, place_to_str
from .kato import invariant_vector, kato_to_str, parse_kato
from .complexes import verify_finite_theorem
from .mackey import FieldLattice, mackey_group, mackey_to_str, parse_mackey
from .milnor import MilnorSymbol, weil_check
from .verify import SCHEMA, SUITE_ORDER, run_suites, _rand_ratfunc
from .witt import coker_wp, enumerate_witt_vectors, witt_op_tables, witt_to_str

_FLAGS = ("p", "q", "r", "n", "D", "L", "seed", "jobs")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="wittsym",
        description="exact symbol calculus for Witt vectors, residues, and "
                    "truncated cohomology over small function fields")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        for flag in _FLAGS:
            sp.add_argument(f"--{flag}", type=int, default=None)
        sp.add_argument("--format", choices=FORMATS, default=None)
        sp.add_argument("--config", default=None, metavar="FILE",
                        help="key = value file; explicit flags override")

    common(sub.add_parser("witt-table", help="ring tables and coker(F-1)"))
    sp = sub.add_parser("weil-check", help="weight-2 reciprocity samples")
    sp.add_argument("count", type=int, nargs="?", default=200)
    common(sp)
    sp = sub.add_parser("invariants", help="invariant vector of a symbol")
    sp.add_argument("symbol", help="for example \"<(1/t)|1+t>\"")
    common(sp)
    common(sub.add_parser("kh0", help="residue complex homology report"))
    sp = sub.add_parser("mackey-reduce", help="reduce a Mackey symbol")
    sp.add_argument("symbol", help="for example \"{(1; 0); t}_{F_2(t)/F_2(t)}\"")
    common(sp)
    sp = sub.add_parser("verify", help="run property suites")
    sp.add_argument("suite", nargs="?", default="all",
                    help=f"one of {', '.join(SUITE_ORDER)}, or all")
    common(sp)
    return parser


def _config_from(args):
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {name: getattr(args, name) for name in _FLAGS}
    overrides["format"] = args.format
    return resolve_config(file_values, overrides)


# ---------------------------------------------------------------------------
# subcommands -> (report, flat rows for csv or None)
# ---------------------------------------------------------------------------

def _cmd_witt_table(cfg, args):
    field = field_of_order(cfg.q)
    add_t, mul_t, neg_t = witt_op_tables(field, cfg.r)
    elements = [witt_to_str(x) for x in enumerate_witt_vectors(field, cfg.r)]
    coker = coker_wp(field, cfg.r)
    report = {
        "schema": SCHEMA,
        "config": cfg.as_dict(),
        "elements": elements,
        "add_table": add_t.tolist(),
        "mul_table": mul_t.tolist(),
        "neg_table": neg_t.tolist(),
        "coker_wp": coker.to_json_dict(),
        "checks": [],
    }
    rows = [("op", "i", "j", "result")]
    n = len(elements)
    for i in range(n):
        for j in range(n):
            rows.append(("add", i, j, int(add_t[i, j])))
    for i in range(n):
        for j in range(n):
            rows.append(("mul", i, j, int(mul_t[i, j])))
    rows.append(("coker-order", "", "", coker.order))
    return report, rows


def _cmd_weil_check(cfg, args):
    rff = make_ratfunc_field(field_of_order(cfg.q))
    rng = random.Random(f"{cfg.seed}:weil-cli")
    bound = max(cfg.D, 1)
    failures = []
    for i in range(args.count):
        f = _rand_ratfunc(rng, rff, bound)
        g = _rand_ratfunc(rng, rff, bound)
        rep = weil_check(MilnorSymbol.of((f, g)), bound)
        if not rep.ok:
            failures.append({"sample": i, "product": rep.product_str})
    report = {
        "schema": SCHEMA,
        "config": cfg.as_dict(),
        "samples": args.count,
        "entry_degree_bound": bound,
        "failures": failures,
        "checks": [{"name": "weil-reciprocity", "pass": not failures}],
    }
    rows = [("name", "samples", "failures", "pass"),
            ("weil-reciprocity", args.count, len(failures), not failures)]
    return report, rows


def _cmd_invariants(cfg, args):
    rff = make_ratfunc_field(field_of_order(cfg.q))
    sym = parse_kato(args.symbol, rff, cfg.r)
    iv, kinds = invariant_vector(sym, classify=True)
    total = iv.total()
    report = {
        "schema": SCHEMA,
        "config": cfg.as_dict(),
        "symbol": [kato_to_str(t) for t in sym] if isinstance(sym, tuple)
                  else kato_to_str(sym),
        "invariants": iv.to_json_dict(),
        "kinds": {place_to_str(v): kind for v, kind in sorted(
            kinds.items(), key=lambda it: it[0].sort_key())},
        "total": total,
        "checks": [{"name": "reciprocity-total-zero", "pass": total == 0}],
    }
    rows = [("place", "invariant")]
    rows.extend((place, val) for place, val in report["invariants"].items())
    rows.append(("total", total))
    return report, rows


def _cmd_kh0(cfg, args):
    report = verify_finite_theorem(cfg.q, cfg.r, cfg.D, cfg.symbol_bound)
    report["config"] = cfg.as_dict()
    return report, None


def _cmd_mackey_reduce(cfg, args):
    lat = FieldLattice(field_of_order(cfg.q), max(cfg.D, 1))
    sym = parse_mackey(args.symbol, lat, cfg.r)
    terms = sym if isinstance(sym, tuple) else (sym,)
    group = mackey_group(lat, terms[0].n, cfg.r)
    coords = group.class_coords(terms)
    reduced = group.presentation.reduce_class(coords)
    report = {
        "schema": SCHEMA,
        "config": cfg.as_dict(),
        "symbol": [mackey_to_str(t) for t in terms],
        "group": group.to_json_dict(),
        "class_coords": [int(c) for c in coords],
        "reduced": [int(c) for c in reduced[:group.presentation.ngens]],
        "is_zero": bool(group.presentation.is_zero_class(coords)),
        "checks": [],
    }
    rows = [("generator", "coefficient")]
    rows.extend((g, int(c)) for g, c in
                zip(group.presentation.generators, reduced))
    return report, rows


def _cmd_verify(cfg, args):
    report = run_suites(args.suite, cfg)
    return report, None


_COMMANDS = {
    "witt-table": _cmd_witt_table,
    "weil-check": _cmd_weil_check,
    "invariants": _cmd_invariants,
    "kh0": _cmd_kh0,
    "mackey-reduce": _cmd_mackey_reduce,
    "verify": _cmd_verify,
}


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _all_checks(report):
    out = list(report.get("checks", ()))
    for suite in report.get("suites", ()):
        out.extend(suite.get("checks", ()))
    return out


def _text_lines(report):
    lines = []
    for key in ("samples", "total", "deg0_rank", "pool_size", "is_zero"):
        if key in report:
            lines.append(f"{key}: {report[key]}")
    if "elements" in report:
        lines.append(f"elements: {len(report['elements'])}")
        lines.append("  " + "  ".join(report["elements"]))
    if "invariants" in report:
        for place, val in report["invariants"].items():
            lines.append(f"inv[{place}] = {val}")
    if "kh0" in report:
        lines.append(f"kh0: order {report['kh0']['order']}, "
                     f"invariant factors {report['kh0']['invariant_factors']}")
    if "f_star" in report:
        lines.append(f"pushforward: surjective={report['f_star']['surjective']}, "
                     f"kernel_dim={report['f_star']['kernel_dim_at_truncation']}")
    if "coker_wp" in report:
        lines.append(f"coker(F-1): order {report['coker_wp']['order']}, "
                     f"invariant factors {report['coker_wp']['invariant_factors']}")
    if "reduced" in report:
        lines.append(f"reduced coordinates: {report['reduced']}")
    for suite in report.get("suites", ()):
        lines.append(f"suite {suite['suite']}: {'PASS' if suite['pass'] else 'FAIL'} "
                     f"({len(suite['checks'])} checks)")
        for ch in suite["checks"]:
            if not ch["pass"]:
                lines.append(f"  FAIL {ch['name']}: {ch}")
    for ch in report.get("checks", ()):
        lines.append(f"check {ch['name']}: {'PASS' if ch['pass'] else 'FAIL'}")
    return lines


def _emit(report, rows, cfg):
    if cfg.format == "json":
        print(json.dumps(report, indent=2))
    elif cfg.format == "text":
        for line in _text_lines(report):
            print(line)
    else:
        if rows is None:
            raise ConfigError(
                "this report is nested; csv is limited to flat tables "
                "(use --format json)")
        writer = csv.writer(sys.stdout, lineterminator="\n")
        for row in rows:
            writer.writerow(row)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        cfg = _config_from(args)
        report, rows = _COMMANDS[args.command](cfg, args)
        _emit(report, rows, cfg)
    except (ConfigError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except WittSymError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0 if all(c["pass"] for c in _all_checks(report)) else 1
