"""Sparse exact matrices with rank, kernel and linear solves.

Over QQ elimination is fraction-free: rows are kept as primitive integer vectors
and combined by cross-multiplication followed by content removal, so no
rational arithmetic happens until the final back-substitution. Over GF(q) the
matrix is densified and handed to :func:`dgquot.kernels.rref_mod_p`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Optional, Sequence

import numpy as np

from .. import kernels
from .field import QQ, ContractError, Field, PrimeField

Triplet = tuple[int, int, object]


@dataclass(frozen=True, eq=True)
class ExactMatrix:
    """Immutable sparse matrix; ``entries`` is a sorted tuple of nonzero triplets."""

    rows: int
    cols: int
    entries: tuple[Triplet, ...]
    field: Field = QQ

    # ----------------------------------------------------------- construction

    @classmethod
    def from_triplets(cls, rows: int, cols: int, triplets: Iterable[Triplet], field: Field = QQ) -> "ExactMatrix":
        acc: dict[tuple[int, int], object] = {}
        conv = field.convert
        for r, c, v in triplets:
            r, c = int(r), int(c)
            if not (0 <= r < rows and 0 <= c < cols):
                raise ContractError(f"entry ({r}, {c}) outside a {rows}x{cols} matrix")
            key = (r, c)
            acc[key] = conv(v) + acc[key] if key in acc else conv(v)
        if isinstance(field, PrimeField):
            q = field.q
            ents = tuple((r, c, v % q) for (r, c), v in sorted(acc.items()) if v % q)
        else:
            ents = tuple((r, c, v) for (r, c), v in sorted(acc.items()) if v != 0)
        return cls(rows, cols, ents, field)

    @classmethod
    def from_dense(cls, arr, field: Field = QQ) -> "ExactMatrix":
        arr = np.asarray(arr, dtype=object) if not isinstance(arr, np.ndarray) else arr
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        rows, cols = arr.shape
        nz = np.argwhere(arr != 0)
        return cls.from_triplets(rows, cols, ((r, c, arr[r, c]) for r, c in nz), field)

    @classmethod
    def zeros(cls, rows: int, cols: int, field: Field = QQ) -> "ExactMatrix":
        return cls(rows, cols, (), field)

    @classmethod
    def identity(cls, n: int, field: Field = QQ) -> "ExactMatrix":
        return cls(n, n, tuple((i, i, field.one) for i in range(n)), field)

    @classmethod
    def hstack(cls, blocks: Sequence["ExactMatrix"], rows: Optional[int] = None, field: Optional[Field] = None) -> "ExactMatrix":
        if not blocks:
            return cls.zeros(rows or 0, 0, field or QQ)
        rows = blocks[0].rows
        field = blocks[0].field
        trip, off = [], 0
        for b in blocks:
            if b.rows != rows:
                raise ContractError("hstack of matrices with different row counts")
            trip.extend((r, c + off, v) for r, c, v in b.entries)
            off += b.cols
        return cls(rows, off, tuple(sorted(trip, key=lambda e: (e[0], e[1]))), field)

    @classmethod
    def vstack(cls, blocks: Sequence["ExactMatrix"]) -> "ExactMatrix":
        return cls.hstack([b.T for b in blocks]).T

    # -------------------------------------------------------------- accessors

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def to_dense(self) -> np.ndarray:
        out = self.field.zeros((self.rows, self.cols))
        for r, c, v in self.entries:
            out[r, c] = v
        return out

    @cached_property
    def row_dicts(self) -> list[dict[int, object]]:
        rows: list[dict[int, object]] = [dict() for _ in range(self.rows)]
        for r, c, v in self.entries:
            rows[r][c] = v
        return rows

    @cached_property
    def T(self) -> "ExactMatrix":
        ents = tuple(sorted(((c, r, v) for r, c, v in self.entries), key=lambda e: (e[0], e[1])))
        return ExactMatrix(self.cols, self.rows, ents, self.field)

    def transpose(self) -> "ExactMatrix":
        return self.T

    def column(self, j: int) -> list:
        col = [self.field.zero] * self.rows
        for r, c, v in self.entries:
            if c == j:
                col[r] = v
        return col

    def columns(self, idx: Sequence[int]) -> "ExactMatrix":
        pos = {j: k for k, j in enumerate(idx)}
        return ExactMatrix.from_triplets(
            self.rows, len(idx), ((r, pos[c], v) for r, c, v in self.entries if c in pos), self.field
        )

    def with_field(self, field: Field) -> "ExactMatrix":
        if field == self.field:
            return self
        return ExactMatrix.from_triplets(self.rows, self.cols, self.entries, field)

    # ------------------------------------------------------------- arithmetic

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ContractError(f"cannot multiply {self.shape} by {other.shape}")
        right = other.row_dicts
        acc: dict[tuple[int, int], object] = {}
        for r, k, v in self.entries:
            for c, w in right[k].items():
                key = (r, c)
                acc[key] = acc.get(key, 0) + v * w
        return ExactMatrix.from_triplets(self.rows, other.cols, ((r, c, v) for (r, c), v in acc.items()), self.field)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.shape != other.shape:
            raise ContractError("shape mismatch in addition")
        return ExactMatrix.from_triplets(self.rows, self.cols, self.entries + other.entries, self.field)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix.from_triplets(self.rows, self.cols, ((r, c, -v) for r, c, v in self.entries), self.field)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def scale(self, s) -> "ExactMatrix":
        s = self.field.convert(s)
        return ExactMatrix.from_triplets(self.rows, self.cols, ((r, c, v * s) for r, c, v in self.entries), self.field)

    def apply(self, vec: Sequence) -> list:
        if len(vec) != self.cols:
            raise ContractError(f"vector of length {len(vec)} for a matrix with {self.cols} columns")
        out = [self.field.zero] * self.rows
        for r, c, v in self.entries:
            out[r] = out[r] + v * vec[c]
        if isinstance(self.field, PrimeField):
            out = [x % self.field.q for x in out]
        return out

    # ---------------------------------------------------------- linear algebra

    def rank(self) -> int:
        return rank_of(self)

    def kernel(self) -> "ExactMatrix":
        return rank_kernel(self)[1]

    def __repr__(self) -> str:
        return f"ExactMatrix({self.rows}x{self.cols}, nnz={self.nnz}, field={self.field!r})"


# ------------------------------------------------------------------- QQ engine


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = reduce(math.gcd, row.values(), 0)
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g not in (1,):
        row = {c: v // g for c, v in row.items()}
    return row


def _integer_rows(m: ExactMatrix) -> list[dict[int, int]]:
    out = []
    for row in m.row_dicts:
        if not row:
            continue
        den = reduce(lambda acc, v: acc * v.denominator // math.gcd(acc, v.denominator), row.values(), 1)
        out.append(_primitive({c: int(v * den) for c, v in row.items()}))
    return out


def _echelon_qq(rows: list[dict[int, int]]) -> dict[int, dict[int, int]]:
    """Fraction-free forward elimination; returns ``{pivot column: primitive row}``."""
    pivots: dict[int, dict[int, int]] = {}
    # short rows first keeps fill-in low
    for row in sorted(rows, key=lambda r: (min(r), len(r))):
        r = row
        while r:
            c = min(r)
            p = pivots.get(c)
            if p is None:
                pivots[c] = _primitive(r)
                break
            a, b = r[c], p[c]
            g = math.gcd(a, b)
            a, b = a // g, b // g
            new = {k: b * v for k, v in r.items()}
            for k, v in p.items():
                w = new.get(k, 0) - a * v
                if w:
                    new[k] = w
                else:
                    new.pop(k, None)
            r = _primitive(new) if new else new
    return pivots


def _rref_qq(pivots: dict[int, dict[int, int]]) -> dict[int, dict[int, Fraction]]:
    """Back-substitute an echelon form into reduced form with unit pivots."""
    reduced: dict[int, dict[int, Fraction]] = {}
    for c in sorted(pivots, reverse=True):
        row = pivots[c]
        lead = row[c]
        vec = {k: Fraction(v, lead) for k, v in row.items()}
        for k in sorted(k for k in row if k != c and k in reduced):
            f = vec.pop(k, 0)
            if f:
                for kk, vv in reduced[k].items():
                    if kk == k:
                        continue
                    w = vec.get(kk, 0) - f * vv
                    if w:
                        vec[kk] = w
                    else:
                        vec.pop(kk, None)
        reduced[c] = vec
    return reduced


# -------------------------------------------------------------------- GF engine


def _rref_gf(m: ExactMatrix):
    dense = np.zeros((m.rows, m.cols), dtype=np.int64)
    for r, c, v in m.entries:
        dense[r, c] = v
    return kernels.rref_mod_p(dense, m.field.q)


# ------------------------------------------------------------------ public API


def rank_of(m: ExactMatrix) -> int:
    if not m.entries:
        return 0
    if isinstance(m.field, PrimeField):
        return int(_rref_gf(m)[1].size)
    return len(_echelon_qq(_integer_rows(m)))


def rank_kernel(m: ExactMatrix) -> tuple[int, ExactMatrix]:
    """Rank and a kernel basis (as columns, one per free column, in column order)."""
    if isinstance(m.field, PrimeField):
        q = m.field.q
        if not m.entries:
            return 0, ExactMatrix.identity(m.cols, m.field)
        R, piv = _rref_gf(m)
        piv = [int(c) for c in piv]
        pivset = set(piv)
        free = [c for c in range(m.cols) if c not in pivset]
        trip = []
        for j, f in enumerate(free):
            trip.append((f, j, 1))
            for i, c in enumerate(piv):
                v = int(R[i, f])
                if v:
                    trip.append((c, j, (-v) % q))
        return len(piv), ExactMatrix.from_triplets(m.cols, len(free), trip, m.field)
    if not m.entries:
        return 0, ExactMatrix.identity(m.cols, m.field)
    red = _rref_qq(_echelon_qq(_integer_rows(m)))
    free = [c for c in range(m.cols) if c not in red]
    col_of = {f: j for j, f in enumerate(free)}
    trip = [(f, j, 1) for j, f in enumerate(free)]
    for c, row in red.items():
        for k, v in row.items():
            if k != c:
                trip.append((c, col_of[k], -v))
    return len(red), ExactMatrix.from_triplets(m.cols, len(free), trip, m.field)


def solve_many(m: ExactMatrix, rhs: ExactMatrix) -> Optional[ExactMatrix]:
    """Solve ``m X = rhs`` column by column with free variables set to zero; ``None`` if inconsistent."""
    if rhs.rows != m.rows:
        raise ContractError(f"right-hand side has {rhs.rows} rows, matrix has {m.rows}")
    aug = ExactMatrix.hstack([m, rhs.with_field(m.field)])
    n = m.cols
    if isinstance(m.field, PrimeField):
        if not aug.entries:
            return ExactMatrix.zeros(n, rhs.cols, m.field)
        R, piv = _rref_gf(aug)
        piv = [int(c) for c in piv]
        if piv and piv[-1] >= n:
            return None
        trip = [(c, j, int(R[i, n + j])) for i, c in enumerate(piv) for j in range(rhs.cols)]
        return ExactMatrix.from_triplets(n, rhs.cols, trip, m.field)
    red = _rref_qq(_echelon_qq(_integer_rows(aug)))
    if any(c >= n for c in red):
        return None
    trip = [(c, k - n, v) for c, row in red.items() for k, v in row.items() if k >= n]
    return ExactMatrix.from_triplets(n, rhs.cols, trip, m.field)


def solve_linear(m: ExactMatrix, b: Sequence) -> Optional[list]:
    """A particular solution of ``m x = b`` (free variables set to zero), or ``None``."""
    if len(b) != m.rows:
        raise ContractError(f"right-hand side has {len(b)} entries, matrix has {m.rows} rows")
    col = ExactMatrix.from_triplets(m.rows, 1, ((i, 0, v) for i, v in enumerate(b)), m.field)
    x = solve_many(m, col)
    return None if x is None else x.column(0)


def column_space_basis(m: ExactMatrix) -> ExactMatrix:
    """Canonical basis of the column space: the transpose of rref(m^T) (reduced column echelon form)."""
    t = m.T
    if isinstance(m.field, PrimeField):
        if not t.entries:
            return ExactMatrix.zeros(m.rows, 0, m.field)
        R, piv = _rref_gf(t)
        return ExactMatrix.from_dense(R[: piv.size].T, m.field)
    red = _rref_qq(_echelon_qq(_integer_rows(t)))
    trip = []
    for j, c in enumerate(sorted(red)):
        for k, v in red[c].items():
            trip.append((k, j, v))
    return ExactMatrix.from_triplets(m.rows, len(red), trip, m.field)


def inverse(m: ExactMatrix) -> ExactMatrix:
    if m.rows != m.cols:
        raise ContractError("inverse of a non-square matrix")
    x = solve_many(m, ExactMatrix.identity(m.rows, m.field))
    if x is None or rank_of(m) < m.rows:
        raise ContractError("matrix is not invertible")
    return x
