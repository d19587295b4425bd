"""Finitely presented abelian p-groups: Howell form linear algebra over Z/p^r.

Every quotient group the package computes (Witt cokernels, symbol groups,
complex homology) is presented as (Z/p^r)^n modulo the row span of a
relation matrix.  Over the local ring Z/p^r a row span has a canonical
echelon basis (Howell form) with pivots p^e in strictly increasing columns;
that basis answers membership, order and class-reduction queries exactly.

Rows are numpy int64 vectors; all entries stay below p^(2r) during updates
so there is no overflow at the sizes this package allows (p^r <= 3^4).
"""

from __future__ import annotations

import numpy as np

from .errors import LengthMismatch, NoPreimage


def pval(a, p, r):
    """p-adic valuation of a mod p^r; the valuation of 0 is r."""
    if a % p ** r == 0:
        return r
    e = 0
    while a % p == 0:
        a //= p
        e += 1
    return e


class HowellBasis:
    """Canonical echelon basis of a row span in (Z/m)^n, m = p^r.

    When track=k > 0 the rows carry k bookkeeping columns on the right that
    record how each basis row was combined from the input rows; pivoting
    never happens inside the tracked block.
    """

    def __init__(self, ncols, p, r, track=0):
        self.ncols = ncols
        self.p = p
        self.r = r
        self.m = p ** r
        self.track = track
        self.width = ncols + track
        self.rows = []   # list of np arrays, pivot columns strictly increasing
        self.pivots = [] # (col, e) parallel to rows

    def _first_active(self, row):
        nz = np.nonzero(row[: self.ncols])[0]
        return int(nz[0]) if nz.size else -1

    def add_row(self, row):
        """Insert one relation row (a sequence of ints of length ncols [+track])."""
        m, p, r = self.m, self.p, self.r
        row = np.asarray(row, dtype=np.int64) % m
        if row.shape[0] == self.ncols and self.track:
            row = np.concatenate([row, np.zeros(self.track, dtype=np.int64)])
        if row.shape[0] != self.width:
            raise LengthMismatch(f"row of width {row.shape[0]}, expected {self.width}")
        queue = [row]
        while queue:
            cur = queue.pop() % m
            i = 0
            while True:
                c = self._first_active(cur)
                if c < 0:
                    break
                while i < len(self.rows) and self.pivots[i][0] < c:
                    i += 1
                if i == len(self.rows) or self.pivots[i][0] > c:
                    # new pivot column
                    e = pval(int(cur[c]), p, r)
                    u = int(cur[c]) // p ** e
                    cur = (cur * pow(u, -1, m)) % m
                    self.rows.insert(i, cur)
                    self.pivots.insert(i, (c, e))
                    if e > 0:
                        queue.append((cur * p ** (r - e)) % m)
                    break
                # same pivot column as basis row i
                e_b = self.pivots[i][1]
                a = int(cur[c])
                e_a = pval(a, p, r)
                if e_a >= e_b:
                    cur = (cur - (a // p ** e_b) * self.rows[i]) % m
                else:
                    # incoming row has the better pivot: swap it in
                    u = a // p ** e_a
                    cur = (cur * pow(u, -1, m)) % m
                    old = self.rows[i]
                    self.rows[i] = cur
                    self.pivots[i] = (c, e_a)
                    queue.append((cur * p ** (r - e_a)) % m)
                    cur = old

    def add_rows(self, rows):
        for row in rows:
            self.add_row(row)

    def canonicalize(self):
        """Reduce entries above every pivot below that pivot's p^e."""
        m, p = self.m, self.p
        for i, (c, e) in enumerate(self.pivots):
            pe = p ** e
            for j in range(i):
                a = int(self.rows[j][c])
                if a >= pe:
                    self.rows[j] = (self.rows[j] - (a // pe) * self.rows[i]) % m

    def reduce(self, vec):
        """Canonical representative of vec modulo the span."""
        m, p = self.m, self.p
        vec = np.asarray(vec, dtype=np.int64) % m
        if vec.shape[0] == self.ncols and self.track:
            vec = np.concatenate([vec, np.zeros(self.track, dtype=np.int64)])
        if vec.shape[0] != self.width:
            raise LengthMismatch(f"vector of width {vec.shape[0]}, expected {self.width}")
        out = vec.copy()
        for i, (c, e) in enumerate(self.pivots):
            a = int(out[c])
            pe = p ** e
            if a >= pe:
                out = (out - (a // pe) * self.rows[i]) % m
        return out

    def contains(self, vec):
        red = self.reduce(vec)
        return not np.any(red[: self.ncols])

    def span_order(self):
        out = 1
        for _, e in self.pivots:
            out *= self.m // self.p ** e
        return out

    def quotient_order(self):
        return self.m ** self.ncols // self.span_order()

    def span_diagonal(self):
        """Pivot exponents, padded with r for columns without a pivot."""
        have = dict(self.pivots)
        return [have.get(c, self.r) for c in range(self.ncols)]


def solve_in_span(basis, vec):
    """Coefficients expressing vec as a combination of the rows fed into basis.

    Requires the basis to have been built with track equal to the number of
    input rows and each input row augmented by a distinct unit vector.
    Raises NoPreimage if vec is not in the span.
    """
    if basis.track == 0:
        raise NoPreimage("basis was built without coefficient tracking")
    red = basis.reduce(np.concatenate([
        np.asarray(vec, dtype=np.int64) % basis.m,
        np.zeros(basis.track, dtype=np.int64),
    ]))
    if np.any(red[: basis.ncols]):
        raise NoPreimage("vector is outside the span")
    return tuple(int(x) for x in (-red[basis.ncols:]) % basis.m)


def local_smith_exponents(rows, p, r):
    """Exponents e with SNF diag (p^e) of the matrix over Z/p^r, ascending."""
    m = p ** r
    mat = [list(int(x) % m for x in row) for row in rows]
    mat = [row for row in mat if any(v % m for v in row)]
    out = []
    while mat:
        best = None
        for i, row in enumerate(mat):
            for j, a in enumerate(row):
                if a % m:
                    e = pval(a, p, r)
                    if best is None or e < best[0]:
                        best = (e, i, j)
        if best is None:
            break
        e, bi, bj = best
        mat[0], mat[bi] = mat[bi], mat[0]
        for row in mat:
            row[0], row[bj] = row[bj], row[0]
        u = (mat[0][0] // p ** e) % m
        inv = pow(u, -1, m)
        mat[0] = [(inv * v) % m for v in mat[0]]
        pe = p ** e
        for i in range(1, len(mat)):
            a = mat[i][0]
            if a % m:
                lam = a // pe
                mat[i] = [(mat[i][j] - lam * mat[0][j]) % m for j in range(len(mat[i]))]
        ncols = len(mat[0])
        for j in range(1, ncols):
            a = mat[0][j]
            if a % m:
                lam = a // pe
                for row in mat:
                    row[j] = (row[j] - lam * row[0]) % m
        out.append(e)
        mat = [row[1:] for row in mat[1:] if any(v % m for v in row[1:])]
    out.sort()
    return out


class GroupPresentation:
    """Finite abelian group (Z/p^r)^n modulo relation rows, with labels.

    Generators are identified by opaque string labels in a fixed order.
    Relations can be added until the first query; after that the object is
    treated as frozen (adding more raises).
    """

    def __init__(self, p, r, generators):
        self.p = p
        self.r = r
        self.m = p ** r
        self.generators = tuple(generators)
        self._index = {g: i for i, g in enumerate(self.generators)}
        if len(self._index) != len(self.generators):
            raise LengthMismatch("duplicate generator labels")
        self.basis = HowellBasis(len(self.generators), p, r)
        self._frozen = False
        self.relation_count = 0

    @property
    def ngens(self):
        return len(self.generators)

    def gen_index(self, label):
        return self._index[label]

    def unit_vector(self, label, coeff=1):
        v = np.zeros(self.ngens, dtype=np.int64)
        v[self._index[label]] = coeff % self.m
        return v

    def add_relation(self, row):
        if self._frozen:
            raise LengthMismatch("presentation is frozen")
        self.basis.add_row(row)
        self.relation_count += 1

    def add_relation_dict(self, coeffs):
        """Relation given as {label: coefficient}."""
        self.add_relation_sparse({self._index[label]: c for label, c in coeffs.items()})

    def add_relation_sparse(self, coeffs):
        """Relation given as {generator index: coefficient}."""
        v = np.zeros(self.ngens, dtype=np.int64)
        for i, c in coeffs.items():
            v[i] += c
        self.add_relation(v)

    def _freeze(self):
        if not self._frozen:
            self.basis.canonicalize()
            self._frozen = True

    def order(self):
        self._freeze()
        return self.basis.quotient_order()

    def reduce_class(self, vec):
        self._freeze()
        return self.basis.reduce(np.asarray(vec, dtype=np.int64))

    def is_zero_class(self, vec):
        return not np.any(self.reduce_class(vec))

    def class_order(self, vec):
        """Order of the class of vec in the quotient: least p^j killing it."""
        self._freeze()
        for j in range(self.r + 1):
            if self.is_zero_class((self.p ** j) * np.asarray(vec, dtype=np.int64)):
                return self.p ** j
        return self.m  # pragma: no cover - j = r always succeeds

    def invariant_factors(self):
        """Cyclic decomposition orders of the quotient, ascending, 1s dropped."""
        self._freeze()
        exps = local_smith_exponents(self.basis.rows, self.p, self.r) if self.basis.rows else []
        # a pivot exponent e leaves a cyclic factor of order p^e;
        # columns without any pivot contribute full factors p^r
        factors = [self.p ** e for e in exps if e > 0]
        factors += [self.m] * (self.ngens - len(exps))
        factors.sort()
        return tuple(factors)

    def to_json_dict(self):
        self._freeze()
        return {
            "generators": list(self.generators),
            "relation_matrix": [[int(x) for x in row[: self.ngens]] for row in self.basis.rows],
            "order": self.order(),
            "invariant_factors": list(self.invariant_factors()),
        }
