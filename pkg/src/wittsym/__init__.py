"""Exact symbol calculus over small fields of characteristic p.

Truncated Witt vectors and the Artin-Schreier-Witt map, Milnor K-symbols
with tame residues, the Cartier operator and its filtration, weight-one
symbol classes with local invariants over F_q(t), Mackey products with
transfers and restrictions, and the degree-truncated residue complex of
the projective line -- all in exact arithmetic, with verification suites
that certify the structural isomorphisms at small scale.
"""

from .config import RunConfig, resolve_config
from .errors import WittSymError
from .fields import FqField, embed, field_of_order, make_field
from .funcfield import (
    Place,
    Poly,
    RatFunc,
    RatFuncField,
    enumerate_places,
    make_ratfunc_field,
)
from .witt import (
    WittVector,
    coker_wp,
    teichmuller,
    v_teichmuller,
    witt_trace,
    witt_trace_invariant,
    wp,
)
from .milnor import MilnorSymbol, tame_symbol, weil_check
from .forms import DiffForm, b_level, cartier, d, dlog, inv_cartier
from .kato import (
    InvariantVector,
    KatoSymbol,
    corestriction_const,
    hbn_check,
    invariant_vector,
    parse_kato,
)
from .mackey import (
    FieldLattice,
    MackeySymbol,
    extended_symbol,
    mackey_group,
    parse_mackey,
    pf_rewrite,
    restriction,
    transfer,
)
from .complexes import KatoComplexP1, build_complex, verify_finite_theorem
from .verify import run_suite, run_suites

__version__ = "0.1.0"

__all__ = [
    "RunConfig", "resolve_config", "WittSymError",
    "FqField", "embed", "field_of_order", "make_field",
    "Place", "Poly", "RatFunc", "RatFuncField", "enumerate_places",
    "make_ratfunc_field",
    "WittVector", "coker_wp", "teichmuller", "v_teichmuller",
    "witt_trace", "witt_trace_invariant", "wp",
    "MilnorSymbol", "tame_symbol", "weil_check",
    "DiffForm", "b_level", "cartier", "d", "dlog", "inv_cartier",
    "InvariantVector", "KatoSymbol", "corestriction_const", "hbn_check",
    "invariant_vector", "parse_kato",
    "FieldLattice", "MackeySymbol", "extended_symbol", "mackey_group",
    "parse_mackey", "pf_rewrite", "restriction", "transfer",
    "KatoComplexP1", "build_complex", "verify_finite_theorem",
    "run_suite", "run_suites",
    "__version__",
]
