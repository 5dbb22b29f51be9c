"""Exact sparse linear algebra over the rationals.

Vectors are dicts mapping column index (an opaque canonical-basis id supplied
by the caller) to a nonzero rational.  All elimination is exact; pivoting is
deterministic (lowest column index first, then input order), so every basis
produced here is reproducible bit-for-bit.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Optional

try:
    from gmpy2 import mpq as QQ
except ImportError:  # pragma: no cover - gmpy2 is a hard dependency in practice
    from fractions import Fraction as QQ

ZERO = QQ(0)
ONE = QQ(1)

SparseVector = dict  # {column index: rational}


def vec(entries: Mapping) -> SparseVector:
    """Build a sparse vector, dropping explicit zeros and normalizing to QQ."""
    return {c: QQ(x) for c, x in entries.items() if x != 0}


def vec_add(a: SparseVector, b: SparseVector, coeff=ONE) -> SparseVector:
    """Return a + coeff*b."""
    out = dict(a)
    for c, x in b.items():
        s = out.get(c, ZERO) + coeff * x
        if s:
            out[c] = s
        else:
            out.pop(c, None)
    return out


def vec_scale(a: SparseVector, coeff) -> SparseVector:
    if not coeff:
        return {}
    return {c: coeff * x for c, x in a.items()}


class Echelon:
    """Incrementally built row-echelon basis of a subspace.

    Rows are kept with unit pivots; a new vector is fully reduced against the
    existing rows before insertion, which makes ``add``/``residue`` usable both
    for building a span and for membership tests.
    """

    def __init__(self, ambient_dim: Optional[int] = None):
        self.ambient_dim = ambient_dim
        self.pivot_rows: dict = {}  # pivot column -> row (dict)

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def residue(self, v: SparseVector) -> SparseVector:
        """Reduce v against the current rows; result has no pivot-column entries."""
        out = dict(v)
        pr = self.pivot_rows
        while True:
            hit = [c for c in out if c in pr]
            if not hit:
                return out
            for c in sorted(hit):
                x = out.get(c)
                if not x:
                    continue
                row = pr[c]
                for cc, y in row.items():
                    s = out.get(cc, ZERO) - x * y
                    if s:
                        out[cc] = s
                    else:
                        out.pop(cc, None)

    def add(self, v: SparseVector) -> bool:
        """Insert v; returns True if the rank grew."""
        res = self.residue(v)
        if not res:
            return False
        p = min(res)
        inv = ONE / res[p]
        self.pivot_rows[p] = {c: inv * x for c, x in res.items()}
        return True

    def contains(self, v: SparseVector) -> bool:
        return not self.residue(v)

    def reduced_rows(self) -> list:
        """Rows back-substituted to reduced row-echelon form, pivot order."""
        pivots = sorted(self.pivot_rows)
        rows = {p: dict(self.pivot_rows[p]) for p in pivots}
        pivset = set(pivots)
        for i in range(len(pivots) - 1, -1, -1):
            p = pivots[i]
            row = rows[p]
            for q in [c for c in row if c != p and c in pivset]:
                x = row[q]
                qrow = rows[q]
                for cc, y in qrow.items():
                    s = row.get(cc, ZERO) - x * y
                    if s:
                        row[cc] = s
                    else:
                        row.pop(cc, None)
        return [rows[p] for p in pivots]

    def reduce_fully(self) -> None:
        """Convert in place to reduced row-echelon form (speeds up residue)."""
        self.pivot_rows = {min(r): r for r in self.reduced_rows()}


class SubspaceBasis:
    """Immutable reduced row-echelon basis of a subspace."""

    def __init__(self, rows: list, ambient_dim: Optional[int] = None):
        self.rows = rows
        self.ambient_dim = ambient_dim

    @property
    def rank(self) -> int:
        return len(self.rows)

    def __eq__(self, other):
        return isinstance(other, SubspaceBasis) and self.rows == other.rows

    def __repr__(self):
        return f"SubspaceBasis(rank={self.rank}, ambient_dim={self.ambient_dim})"


def echelonize(vectors: Iterable[SparseVector], ambient_dim: Optional[int] = None) -> SubspaceBasis:
    ech = Echelon(ambient_dim)
    for v in vectors:
        if ambient_dim is not None:
            for c in v:
                if not (isinstance(c, int) and 0 <= c < ambient_dim):
                    raise IndexError(f"column index {c!r} out of range 0..{ambient_dim - 1}")
        ech.add(v)
    return SubspaceBasis(ech.reduced_rows(), ambient_dim)


def _check_dim(basis: SubspaceBasis, v: SparseVector) -> None:
    if basis.ambient_dim is not None:
        for c in v:
            if not (isinstance(c, int) and 0 <= c < basis.ambient_dim):
                raise IndexError(f"column index {c!r} outside ambient dimension")


def member(basis: SubspaceBasis, v: SparseVector) -> bool:
    _check_dim(basis, v)
    ech = Echelon(basis.ambient_dim)
    ech.pivot_rows = {min(r): r for r in basis.rows}
    return ech.contains(v)


def quotient_dim(span_dim: int, relations: SubspaceBasis) -> int:
    if relations.ambient_dim is not None and relations.ambient_dim != span_dim:
        raise ValueError("ambient dimension mismatch")
    return span_dim - relations.rank


def intersect(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    """Basis of the intersection of two subspaces (Zassenhaus-style tagging).

    Stack rows of a (tagged with a shadow copy) and rows of b (untagged);
    eliminate on the primary columns; rows whose primary part vanished have
    shadow part in a ∩ b.
    """
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    SHADOW = "s"
    ech = Echelon()
    out = Echelon(a.ambient_dim)
    tagged = [dict(r) | {(SHADOW, c): x for c, x in r.items()} for r in a.rows]
    tagged += [dict(r) for r in b.rows]

    def key(c):
        return (0, c) if not isinstance(c, tuple) else (1, c[1])

    for v in tagged:
        res = dict(v)
        while True:
            hit = [c for c in res if c in ech.pivot_rows]
            if not hit:
                break
            for c in sorted(hit, key=key):
                x = res.get(c)
                if not x:
                    continue
                for cc, y in ech.pivot_rows[c].items():
                    s = res.get(cc, ZERO) - x * y
                    if s:
                        res[cc] = s
                    else:
                        res.pop(cc, None)
        if not res:
            continue
        primary = [c for c in res if not isinstance(c, tuple)]
        if primary:
            p = min(primary)
        else:
            out.add({c[1]: x for c, x in res.items()})
            continue
        inv = ONE / res[p]
        ech.pivot_rows[p] = {c: inv * x for c, x in res.items()}
    return SubspaceBasis(out.reduced_rows(), a.ambient_dim)


def _index_keys(columns: Iterable[SparseVector]) -> dict:
    """Deterministic integer reindexing of arbitrary (sortable) coordinate keys."""
    keys = set()
    for col in columns:
        keys.update(col)
    return {k: i for i, k in enumerate(sorted(keys))}


def nullspace(columns: list) -> SubspaceBasis:
    """Basis of {c : sum_j c_j * columns[j] = 0}, coordinates 0..len-1.

    Column coordinate keys may be any mutually sortable hashable values.
    """
    index = _index_keys(columns)
    ech = Echelon()
    out = Echelon(len(columns))
    for j, col in enumerate(columns):
        res = {index[c]: x for c, x in col.items()}
        res[("x", j)] = ONE
        while True:
            hit = [c for c in res if not isinstance(c, tuple) and c in ech.pivot_rows]
            if not hit:
                break
            for c in sorted(hit):
                x = res.get(c)
                if not x:
                    continue
                for cc, y in ech.pivot_rows[c].items():
                    s = res.get(cc, ZERO) - x * y
                    if s:
                        res[cc] = s
                    else:
                        res.pop(cc, None)
        primary = [c for c in res if not isinstance(c, tuple)]
        if not primary:
            out.add({c[1]: x for c, x in res.items()})
            continue
        p = min(primary)
        inv = ONE / res[p]
        ech.pivot_rows[p] = {c: inv * x for c, x in res.items()}
    return SubspaceBasis(out.reduced_rows(), len(columns))


def solve(matrix: list, rhs: SparseVector) -> Optional[SparseVector]:
    """One exact solution x of sum_j x_j * matrix[j] = rhs, or None.

    ``matrix`` is a list of sparse vectors regarded as columns of the system.
    Coordinate keys may be any mutually sortable hashable values.
    """
    index = _index_keys(list(matrix) + [rhs])
    ech = Echelon()
    # Augment each column vector with a tag recording which unknown it is.
    for j, col in enumerate(matrix):
        res = {index[c]: x for c, x in col.items()}
        res[("x", j)] = ONE
        while True:
            hit = [c for c in res if not isinstance(c, tuple) and c in ech.pivot_rows]
            if not hit:
                break
            for c in sorted(hit):
                x = res.get(c)
                if not x:
                    continue
                for cc, y in ech.pivot_rows[c].items():
                    s = res.get(cc, ZERO) - x * y
                    if s:
                        res[cc] = s
                    else:
                        res.pop(cc, None)
        primary = [c for c in res if not isinstance(c, tuple)]
        if not primary:
            continue
        p = min(primary)
        inv = ONE / res[p]
        ech.pivot_rows[p] = {c: inv * x for c, x in res.items()}
    # Reduce rhs; leftover tag entries give the solution.
    res = {index[c]: x for c, x in rhs.items()}
    sol: dict = {}
    while True:
        hit = [c for c in res if not isinstance(c, tuple) and c in ech.pivot_rows]
        if not hit:
            break
        for c in sorted(hit):
            x = res.get(c)
            if not x:
                continue
            for cc, y in ech.pivot_rows[c].items():
                if isinstance(cc, tuple):
                    s = sol.get(cc[1], ZERO) + x * y
                    if s:
                        sol[cc[1]] = s
                    else:
                        sol.pop(cc[1], None)
                else:
                    s = res.get(cc, ZERO) - x * y
                    if s:
                        res[cc] = s
                    else:
                        res.pop(cc, None)
    if res:
        return None
    return sol
