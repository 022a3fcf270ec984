"""Exact sparse linear algebra over Q.

Everything here works on :class:`fractions.Fraction`; there is no floating
point.  Matrices are stored row-wise as ``{row: {col: value}}`` with zeros never
stored.  Vectors accepted by the public functions may be dense sequences or
sparse ``{index: value}`` dicts.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "SparseMatrixQ",
    "ContainmentViolation",
    "Echelon",
    "rref",
    "rank",
    "kernel_basis",
    "quotient_dimension",
    "solve",
]


class ContainmentViolation(ValueError):
    pass


def _sparse(v, length: int | None = None) -> dict[int, Fraction]:
    if isinstance(v, Mapping):
        return {int(k): Fraction(x) for k, x in v.items() if x}
    out = {}
    for i, x in enumerate(v):
        if x:
            out[i] = Fraction(x)
    return out


class SparseMatrixQ:
    __slots__ = ("nrows", "ncols", "data")

    def __init__(self, nrows: int, ncols: int, entries: Mapping[tuple[int, int], object] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.data: dict[int, dict[int, Fraction]] = {}
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < nrows and 0 <= c < ncols):
                    raise IndexError(f"entry ({r}, {c}) outside {nrows}x{ncols}")
                v = Fraction(v)
                if v:
                    self.data.setdefault(r, {})[c] = v

    @classmethod
    def from_rows(cls, rows: Sequence, ncols: int | None = None) -> "SparseMatrixQ":
        rows = list(rows)
        if ncols is None:
            ncols = max((len(r) for r in rows if not isinstance(r, Mapping)), default=0)
        m = cls(len(rows), ncols)
        for i, r in enumerate(rows):
            sr = _sparse(r)
            if sr:
                if max(sr) >= ncols:
                    raise IndexError("row longer than ncols")
                m.data[i] = sr
        return m

    @classmethod
    def from_columns(cls, cols: Sequence, nrows: int) -> "SparseMatrixQ":
        m = cls(nrows, len(cols))
        for j, col in enumerate(cols):
            for i, v in _sparse(col).items():
                if i >= nrows:
                    raise IndexError("column longer than nrows")
                m.data.setdefault(i, {})[j] = v
        return m

    @classmethod
    def identity(cls, n: int) -> "SparseMatrixQ":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def entries(self) -> dict[tuple[int, int], Fraction]:
        return {(r, c): v for r, row in self.data.items() for c, v in row.items()}

    def __getitem__(self, rc) -> Fraction:
        r, c = rc
        return self.data.get(r, {}).get(c, Fraction(0))

    def row(self, r: int) -> dict[int, Fraction]:
        return dict(self.data.get(r, {}))

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for r, row in self.data.items():
            for c, v in row.items():
                out[r][c] = v
        return out

    def transpose(self) -> "SparseMatrixQ":
        t = SparseMatrixQ(self.ncols, self.nrows)
        for r, row in self.data.items():
            for c, v in row.items():
                t.data.setdefault(c, {})[r] = v
        return t

    def matvec(self, v) -> list[Fraction]:
        sv = _sparse(v)
        out = [Fraction(0)] * self.nrows
        for r, row in self.data.items():
            s = Fraction(0)
            for c, a in row.items():
                x = sv.get(c)
                if x:
                    s += a * x
            out[r] = s
        return out

    def matmul(self, other: "SparseMatrixQ") -> "SparseMatrixQ":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        out = SparseMatrixQ(self.nrows, other.ncols)
        for r, row in self.data.items():
            acc: dict[int, Fraction] = {}
            for k, a in row.items():
                for c, b in other.data.get(k, {}).items():
                    acc[c] = acc.get(c, 0) + a * b
            acc = {c: v for c, v in acc.items() if v}
            if acc:
                out.data[r] = acc
        return out

    def is_zero(self) -> bool:
        return not self.data

    def __eq__(self, other):
        if not isinstance(other, SparseMatrixQ):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __repr__(self):
        return f"SparseMatrixQ({self.nrows}x{self.ncols}, nnz={sum(len(r) for r in self.data.values())})"


class Echelon:
    """Incrementally maintained reduced row space.

    ``add`` reduces a vector against the current basis and keeps it when it is
    independent.  With ``track=True`` each stored row remembers which inserted
    vectors it is built from, so :meth:`express` can write a vector in the span
    as a combination of the inserted vectors.
    """

    def __init__(self, track: bool = False):
        self.rows: dict[int, dict[int, Fraction]] = {}   # pivot -> row (pivot entry 1)
        self.track = track
        self.combos: dict[int, dict[int, Fraction]] = {}
        self.count = 0

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, v: dict[int, Fraction], combo: dict[int, Fraction] | None):
        v = dict(v)
        for p in sorted(self.rows):
            c = v.get(p)
            if not c:
                continue
            for k, a in self.rows[p].items():
                x = v.get(k, 0) - c * a
                if x:
                    v[k] = x
                else:
                    v.pop(k, None)
            if combo is not None:
                for k, a in self.combos[p].items():
                    x = combo.get(k, 0) - c * a
                    if x:
                        combo[k] = x
                    else:
                        combo.pop(k, None)
        return v, combo

    def reduce(self, v) -> dict[int, Fraction]:
        return self._reduce(_sparse(v), None)[0]

    def contains(self, v) -> bool:
        return not self.reduce(v)

    def add(self, v) -> bool:
        index = self.count
        self.count += 1
        combo = {index: Fraction(1)} if self.track else None
        r, combo = self._reduce(_sparse(v), combo)
        if not r:
            return False
        p = min(r)
        inv = 1 / r[p]
        r = {k: a * inv for k, a in r.items()}
        if combo is not None:
            combo = {k: a * inv for k, a in combo.items()}
        # keep existing rows reduced against the new pivot
        for q, row in self.rows.items():
            c = row.get(p)
            if c:
                for k, a in r.items():
                    x = row.get(k, 0) - c * a
                    if x:
                        row[k] = x
                    else:
                        row.pop(k, None)
                if self.track:
                    crow = self.combos[q]
                    for k, a in combo.items():
                        x = crow.get(k, 0) - c * a
                        if x:
                            crow[k] = x
                        else:
                            crow.pop(k, None)
        self.rows[p] = r
        if self.track:
            self.combos[p] = combo
        return True

    def express(self, v) -> dict[int, Fraction] | None:
        """Coefficients over the inserted vectors (by insertion index), or None."""
        if not self.track:
            raise ValueError("Echelon built without tracking")
        sv = _sparse(v)
        combo: dict[int, Fraction] = {}
        residual = dict(sv)
        for p in sorted(self.rows):
            c = residual.get(p)
            if not c:
                continue
            for k, a in self.rows[p].items():
                x = residual.get(k, 0) - c * a
                if x:
                    residual[k] = x
                else:
                    residual.pop(k, None)
            for k, a in self.combos[p].items():
                x = combo.get(k, 0) + c * a
                if x:
                    combo[k] = x
                else:
                    combo.pop(k, None)
        if residual:
            return None
        return combo


def rref(m: SparseMatrixQ) -> tuple[SparseMatrixQ, list[int], int]:
    """Reduced row echelon form, pivot columns and rank."""
    e = Echelon()
    for r in range(m.nrows):
        row = m.data.get(r)
        if row:
            e.add(row)
    pivots = sorted(e.rows)
    out = SparseMatrixQ(m.nrows, m.ncols)
    for i, p in enumerate(pivots):
        out.data[i] = dict(e.rows[p])
    return out, pivots, len(pivots)


def rank(m: SparseMatrixQ) -> int:
    return rref(m)[2]


def kernel_basis(m: SparseMatrixQ) -> list[list[Fraction]]:
    """Basis of {x : m x = 0}; one vector per free column, in column order."""
    reduced, pivots, _ = rref(m)
    pivot_set = set(pivots)
    basis = []
    for f in range(m.ncols):
        if f in pivot_set:
            continue
        v = [Fraction(0)] * m.ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            a = reduced.data[i].get(f)
            if a:
                v[p] = -a
        basis.append(v)
    return basis


def quotient_dimension(sub_gens: Iterable, space_gens: Iterable) -> int:
    """dim span(space_gens) - dim span(sub_gens), after checking containment."""
    space = Echelon()
    for v in space_gens:
        space.add(v)
    sub = Echelon()
    for v in sub_gens:
        if not space.contains(v):
            raise ContainmentViolation("a generator of the subspace lies outside the ambient span")
        sub.add(v)
    return space.rank - sub.rank


def solve(m: SparseMatrixQ, b) -> list[Fraction] | None:
    """Some x with m x = b (free variables set to 0), or None if inconsistent."""
    sb = _sparse(b)
    if sb and max(sb) >= m.nrows:
        raise IndexError("right-hand side longer than the row count")
    # eliminate on the augmented matrix [m | b]
    e = Echelon()
    aug = m.ncols
    for r in range(m.nrows):
        row = dict(m.data.get(r, {}))
        if r in sb:
            row[aug] = sb[r]
        if row:
            e.add(row)
    if aug in e.rows:
        return None
    x = [Fraction(0)] * m.ncols
    for p, row in e.rows.items():
        x[p] = row.get(aug, Fraction(0))
    return x
