"""Exact linear algebra over the rationals.

Everything here works on :class:`fractions.Fraction` entries so that ranks,
kernels and inertia are computed without rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class ExactLinError(ValueError):
    pass


def to_fraction(value) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings. Floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ExactLinError(f"boolean is not a rational entry: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ExactLinError(f"cannot parse rational {value!r}") from exc
    raise ExactLinError(f"unsupported rational entry {value!r} ({type(value).__name__})")


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ExactLinError("negative matrix dimension")
        if len(self.entries) != self.rows * self.cols:
            raise ExactLinError(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "RatMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise ExactLinError("column count is ambiguous for a matrix with no rows")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ExactLinError("ragged matrix rows")
        return cls(len(rows), cols, tuple(to_fraction(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, tuple(Fraction(int(i == j)) for i in range(n) for j in range(n)))

    @classmethod
    def diagonal(cls, values: Iterable) -> "RatMatrix":
        vals = [to_fraction(v) for v in values]
        n = len(vals)
        return cls(n, n, tuple(vals[i] if i == j else Fraction(0) for i in range(n) for j in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row_lists(self) -> list[list[Fraction]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def transpose(self) -> "RatMatrix":
        return RatMatrix(
            self.cols, self.rows,
            tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)),
        )

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ExactLinError(f"shape mismatch {self.shape} @ {other.shape}")
        a, b = self.row_lists(), other.row_lists()
        out = []
        for i in range(self.rows):
            ai = a[i]
            for j in range(other.cols):
                out.append(sum((ai[t] * b[t][j] for t in range(self.cols)), Fraction(0)))
        return RatMatrix(self.rows, other.cols, tuple(out))

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, tuple(-x for x in self.entries))

    def hstack(self, other: "RatMatrix") -> "RatMatrix":
        if self.rows != other.rows:
            raise ExactLinError("hstack needs equal row counts")
        a, b = self.row_lists(), other.row_lists()
        return RatMatrix.from_rows([a[i] + b[i] for i in range(self.rows)], self.cols + other.cols)

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries)

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i)
        )


@dataclass(frozen=True)
class InertiaTriple:
    n_plus: int
    n_minus: int
    n_zero: int

    @property
    def signature(self) -> int:
        return self.n_plus - self.n_minus

    @property
    def size(self) -> int:
        return self.n_plus + self.n_minus + self.n_zero


def rref(m: RatMatrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = m.row_lists()
    pivots: list[int] = []
    row = 0
    for col in range(m.cols):
        if row >= m.rows:
            break
        pr = next((r for r in range(row, m.rows) if a[r][col] != 0), None)
        if pr is None:
            continue
        a[row], a[pr] = a[pr], a[row]
        inv = 1 / a[row][col]
        a[row] = [x * inv for x in a[row]]
        for r in range(m.rows):
            if r != row and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        pivots.append(col)
        row += 1
    return a, pivots


def rank(m: RatMatrix) -> int:
    return len(rref(m)[1])


def kernel_dim(m: RatMatrix) -> int:
    return m.cols - rank(m)


def nullspace(m: RatMatrix) -> RatMatrix:
    """Basis of the right kernel as the columns of a ``cols x nullity`` matrix.

    One basis vector per free column, carrying a 1 in that column.
    """
    a, pivots = rref(m)
    free = [j for j in range(m.cols) if j not in pivots]
    cols = []
    for fj in free:
        v = [Fraction(0)] * m.cols
        v[fj] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -a[r][fj]
        cols.append(v)
    if not cols:
        return RatMatrix.zeros(m.cols, 0)
    return RatMatrix.from_rows(cols).transpose()


def solve(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    """One solution ``x`` of ``a @ x = b``; raises if the system is inconsistent."""
    if a.rows != b.rows:
        raise ExactLinError("solve: row mismatch")
    aug, pivots = rref(a.hstack(b))
    if any(p >= a.cols for p in pivots):
        raise ExactLinError("solve: inconsistent system")
    x = [[Fraction(0)] * b.cols for _ in range(a.cols)]
    for r, pc in enumerate(pivots):
        x[pc] = aug[r][a.cols:]
    return RatMatrix.from_rows(x, b.cols) if a.cols else RatMatrix.zeros(0, b.cols)


def span_dim(*blocks: RatMatrix) -> int:
    """Dimension of the sum of the column spaces of matrices sharing a row count."""
    blocks = [b for b in blocks]
    out = blocks[0]
    for b in blocks[1:]:
        out = out.hstack(b)
    return rank(out)


def inertia(m: RatMatrix) -> InertiaTriple:
    """Exact inertia of a symmetric rational matrix by congruence.

    Uses 1x1 pivots on nonzero diagonal entries and a 2x2 hyperbolic pivot when
    the whole remaining diagonal vanishes.
    """
    if not m.is_symmetric():
        raise ExactLinError("inertia requires a symmetric matrix")
    a = m.row_lists()
    idx = list(range(m.rows))
    plus = minus = 0
    while idx:
        d = next((i for i in idx if a[i][i] != 0), None)
        if d is not None:
            piv = a[d][d]
            if piv > 0:
                plus += 1
            else:
                minus += 1
            idx.remove(d)
            col = {r: a[r][d] for r in idx}
            for r in idx:
                if col[r] == 0:
                    continue
                f = col[r] / piv
                for s in idx:
                    a[r][s] -= f * col[s]
            continue
        pair = next(((i, j) for i in idx for j in idx if i < j and a[i][j] != 0), None)
        if pair is None:
            break
        i, j = pair
        # [[0, c], [c, 0]] has one positive and one negative eigenvalue.
        c = a[i][j]
        plus += 1
        minus += 1
        idx.remove(i)
        idx.remove(j)
        ci = {r: a[r][i] for r in idx}
        cj = {r: a[r][j] for r in idx}
        for r in idx:
            for s in idx:
                # Schur complement with E^{-1} = [[0, 1/c], [1/c, 0]]
                a[r][s] -= (ci[r] * cj[s] + cj[r] * ci[s]) / c
    return InertiaTriple(plus, minus, m.rows - plus - minus)


def signature(m: RatMatrix) -> int:
    return inertia(m).signature


def cartan_matrix(kind: str, rank_: int, affine: bool = False) -> RatMatrix:
    """Cartan matrix of a simply laced type ``"A"`` or ``"D"`` (optionally affine)."""
    n = rank_ + (1 if affine else 0)
    a = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        a[i][i] = Fraction(2)
    edges: list[tuple[int, int]] = []
    if kind == "A" and not affine:
        edges = [(i, i + 1) for i in range(rank_ - 1)]
    elif kind == "D":
        if rank_ < 3:
            raise ExactLinError("D_r needs r >= 3")
        # chain 0-1-...-(r-2) with a fork (r-3)-(r-1)
        edges = [(i, i + 1) for i in range(rank_ - 2)] + [(rank_ - 3, rank_ - 1)]
        if affine:
            edges.append((1, rank_))
    else:
        raise ExactLinError(f"unsupported Cartan type {kind}{'~' if affine else ''}")
    for i, j in edges:
        a[i][j] = a[j][i] = Fraction(-1)
    return RatMatrix.from_rows(a, n)
