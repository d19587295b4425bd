"""Run configuration shared by the command-line driver and the verify suites.

A RunConfig pins every knob a computation reads: characteristic and field
size, Witt length, symbol weight, place-degree bound, Cartier-filtration
level bound, pool caps, the random seed, and the output format.  One frozen
config plus one seed determines every report byte-for-byte.

Config files are flat ``key = value`` lines (a TOML subset): comments start
with ``#``, values are integers except ``format``, and command-line flags
override file values.
"""

from dataclasses import asdict, dataclass, replace

from .errors import ConfigError
from .fields import prime_power_split

FORMATS = ("json", "csv", "text")

MAX_WITT_LENGTH = 4


@dataclass(frozen=True)
class RunConfig:
    """All tunable parameters of a run; validated and immutable."""
    p: int = 2            # characteristic
    q: int = 2            # constant-field order, a power of p
    r: int = 1            # Witt truncation length
    n: int = 1            # symbol weight (number of multiplicative slots)
    D: int = 2            # place-degree / pool-degree bound
    L: int = 3            # Cartier filtration level bound
    symbol_bound: int = 1     # polynomial degree cap for Witt entries in pools
    pool_cap: int = 4096      # hard cap on enumerated pool sizes
    seed: int = 0             # seed for every randomized suite
    format: str = "json"      # report format: json | csv | text
    jobs: int = 1             # worker cap for suite execution

    def validate(self):
        p, k = prime_power_split(self.q)
        if p != self.p:
            raise ConfigError(f"q = {self.q} is not a power of p = {self.p}")
        if not 1 <= self.r <= MAX_WITT_LENGTH:
            raise ConfigError(f"Witt length r = {self.r} outside 1..{MAX_WITT_LENGTH}")
        if self.n < 0:
            raise ConfigError("symbol weight n must be >= 0")
        if self.D < 1:
            raise ConfigError("degree bound D must be >= 1")
        if self.L < 1:
            raise ConfigError("level bound L must be >= 1")
        if self.symbol_bound < 0 or self.pool_cap < 1:
            raise ConfigError("pool caps must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be an unsigned integer")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {'|'.join(FORMATS)}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        return self

    def as_dict(self):
        return asdict(self)


_INT_KEYS = ("p", "q", "r", "n", "D", "L", "symbol_bound", "pool_cap", "seed", "jobs")


def parse_config_text(text):
    """key = value lines -> dict; ignores blanks and # comments."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip().strip("\"'")
        if key in _INT_KEYS:
            try:
                values[key] = int(val, 0)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} needs an integer, got {val!r}")
        elif key == "format":
            values[key] = val
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    return values


def load_config_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def resolve_config(file_values=None, overrides=None):
    """Defaults <- config file <- explicit flags, then validate.

    A q given without p (or vice versa) fills in the other from the
    prime-power factorization."""
    merged = {}
    for source in (file_values or {}), (overrides or {}):
        merged.update({k: v for k, v in source.items() if v is not None})
    if "q" in merged and "p" not in merged:
        merged["p"] = prime_power_split(merged["q"])[0]
    if "p" in merged and "q" not in merged:
        merged["q"] = merged["p"]
    cfg = replace(RunConfig(), **merged)
    return cfg.validate()
