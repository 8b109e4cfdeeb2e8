"""Exact integer lattice algebra.

Smith normal form with certificates, cokernels, saturation, quotient-lattice
presentations and the maps they induce.  Everything runs on Python ints, so
coefficient growth is never a concern.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence


class LatticeError(ValueError):
    pass


class IncompatibleSublatticesError(LatticeError):
    """The map does not carry the source sublattice into the target one."""


class RankMismatchError(LatticeError):
    pass


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]  # row-major

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise LatticeError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, "
                f"got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise LatticeError("ragged rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def from_cols(cls, cols: Sequence[Sequence[int]], rows: int | None = None) -> IntMatrix:
        cols = [list(c) for c in cols]
        if rows is None:
            rows = len(cols[0]) if cols else 0
        if any(len(c) != rows for c in cols):
            raise LatticeError("ragged columns")
        return cls(rows, len(cols), tuple(int(cols[j][i]) for i in range(rows) for j in range(len(cols))))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def to_lists(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def column_vectors(self) -> list[tuple[int, ...]]:
        return [self.col(j) for j in range(self.cols)]

    @property
    def T(self) -> IntMatrix:
        return IntMatrix.from_rows([self.col(j) for j in range(self.cols)], self.rows)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise LatticeError(f"cannot multiply {self.shape} by {other.shape}")
        a, b = self.to_lists(), other.to_lists()
        out = [[sum(a[i][k] * b[k][j] for k in range(self.cols)) for j in range(other.cols)]
               for i in range(self.rows)]
        return IntMatrix.from_rows(out, other.cols)

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.cols:
            raise LatticeError("vector length mismatch")
        return tuple(sum(self[i, k] * v[k] for k in range(self.cols)) for i in range(self.rows))

    def select_rows(self, idx: Iterable[int]) -> IntMatrix:
        return IntMatrix.from_rows([self.row(i) for i in idx], self.cols)

    def select_cols(self, idx: Iterable[int]) -> IntMatrix:
        return IntMatrix.from_cols([self.col(j) for j in idx], self.rows)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def scaled(self, k: int) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(k * x for x in self.entries))

    def __repr__(self):
        return f"IntMatrix({self.to_lists()!r})"


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == D`` with U, V unimodular and D in Smith form."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i, i] for i in range(min(self.D.rows, self.D.cols))]

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)


@dataclass(frozen=True)
class QuotientPresentation:
    """Presentation of Z^d / sat(span B) as Z^(d-p) via ``projection``.

    ``right_inverse`` satisfies ``projection @ right_inverse == I``; it is the
    lift used when pushing maps down to quotients.
    """

    ambient_rank: int
    sublattice_basis: IntMatrix
    projection: IntMatrix
    right_inverse: IntMatrix

    @property
    def rank(self) -> int:
        return self.projection.rows


@dataclass(frozen=True)
class LatticeMap:
    matrix: IntMatrix
    domain_rank: int
    codomain_rank: int

    def __post_init__(self):
        if self.matrix.shape != (self.codomain_rank, self.domain_rank):
            raise LatticeError(
                f"matrix shape {self.matrix.shape} does not match Z^{self.domain_rank} -> Z^{self.codomain_rank}")

    @classmethod
    def of(cls, m: IntMatrix | Sequence[Sequence[int]]) -> LatticeMap:
        if not isinstance(m, IntMatrix):
            m = IntMatrix.from_rows(m)
        return cls(m, m.cols, m.rows)

    def compose(self, inner: LatticeMap) -> LatticeMap:
        """``self ∘ inner``."""
        return LatticeMap.of(self.matrix @ inner.matrix)


# -- Smith normal form -------------------------------------------------------

def snf(A: IntMatrix) -> SmithDecomposition:
    m, n = A.shape
    a = A.to_lists()
    U = IntMatrix.identity(m).to_lists()
    Ui = IntMatrix.identity(m).to_lists()
    V = IntMatrix.identity(n).to_lists()
    Vi = IntMatrix.identity(n).to_lists()

    def swap_rows(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            U[i], U[j] = U[j], U[i]
            for r in Ui:
                r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        if i != j:
            for r in a:
                r[i], r[j] = r[j], r[i]
            for r in V:
                r[i], r[j] = r[j], r[i]
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, c):
        # row_dst += c * row_src
        if c:
            a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
            U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]
            for r in Ui:
                r[src] -= c * r[dst]

    def add_col(dst, src, c):
        if c:
            for r in a:
                r[dst] += c * r[src]
            for r in V:
                r[dst] += c * r[src]
            Vi[src] = [x - c * y for x, y in zip(Vi[src], Vi[dst])]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = a[t][t]
            for i in range(t + 1, m):
                add_row(i, t, -(a[i][t] // p))
            for j in range(t + 1, n):
                add_col(j, t, -(a[t][j] // p))
            # a remainder smaller than the pivot becomes the new pivot
            cand = [(abs(a[i][t]), i, t) for i in range(t + 1, m) if a[i][t]]
            cand += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
            if cand:
                _, i, j = min(cand)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if a[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            negate_row(t)

    return SmithDecomposition(
        U=IntMatrix.from_rows(U, m), D=IntMatrix.from_rows(a, n), V=IntMatrix.from_rows(V, n),
        U_inv=IntMatrix.from_rows(Ui, m), V_inv=IntMatrix.from_rows(Vi, n))


def cokernel_structure(A: IntMatrix) -> tuple[int, list[int]]:
    """Cokernel of ``A: Z^cols -> Z^rows`` as (free rank, invariant factors > 1)."""
    dec = snf(A)
    diag = dec.diagonal
    return A.rows - dec.rank, [x for x in diag if x > 1]


# -- Hermite forms -----------------------------------------------------------

def hnf_rows(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Row-style Hermite normal form of the row lattice; zero rows dropped.

    Pivots are positive and entries above a pivot lie in ``[0, pivot)``.
    """
    a = [list(r) for r in rows]
    out_rows = 0
    for c in range(ncols):
        live = [i for i in range(out_rows, len(a)) if a[i][c]]
        if not live:
            continue
        while True:
            live = [i for i in range(out_rows, len(a)) if a[i][c]]
            k = min(live, key=lambda i: abs(a[i][c]))
            a[out_rows], a[k] = a[k], a[out_rows]
            p = a[out_rows][c]
            done = True
            for i in range(out_rows + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // p
                    a[i] = [x - q * y for x, y in zip(a[i], a[out_rows])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if a[out_rows][c] < 0:
            a[out_rows] = [-x for x in a[out_rows]]
        p = a[out_rows][c]
        for i in range(out_rows):
            q = a[i][c] // p
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[out_rows])]
        out_rows += 1
    return a[:out_rows]


def hnf_cols(M: IntMatrix) -> IntMatrix:
    """Column-lattice basis in (transposed) Hermite form."""
    return IntMatrix.from_cols(hnf_rows(M.T.to_lists(), M.rows), M.rows)


# -- lattices ----------------------------------------------------------------

def saturate(B: IntMatrix) -> IntMatrix:
    """Basis of {v : kv ∈ colspan_Z(B) for some k ≥ 1}, in Hermite form."""
    dec = snf(B)
    sat = dec.U_inv.select_cols(range(dec.rank))
    return hnf_cols(sat)


def right_inverse(P: IntMatrix) -> IntMatrix:
    """Integral R with ``P @ R == I`` for a surjective P."""
    dec = snf(P)
    if dec.rank != P.rows or any(x != 1 for x in dec.diagonal):
        raise LatticeError("matrix is not surjective onto Z^rows")
    # U P V = [I | 0]  =>  P (V[:, :k] U) = I
    return dec.V.select_cols(range(P.rows)) @ dec.U


def quotient_presentation(B: IntMatrix, d: int | None = None) -> QuotientPresentation:
    if d is None:
        d = B.rows
    if B.rows != d:
        raise LatticeError(f"generators live in Z^{B.rows}, expected Z^{d}")
    dec = snf(B)
    r = dec.rank
    proj = dec.U.select_rows(range(r, d))
    proj = IntMatrix.from_rows(hnf_rows(proj.to_lists(), d), d) if proj.rows else IntMatrix.zeros(0, d)
    sub = hnf_cols(dec.U_inv.select_cols(range(r))) if r else IntMatrix.zeros(d, 0)
    return QuotientPresentation(d, sub, proj, right_inverse(proj) if proj.rows else IntMatrix.zeros(d, 0))


def induced_quotient_map(L: LatticeMap, src: QuotientPresentation,
                         dst: QuotientPresentation) -> LatticeMap:
    """The map Z^d/N_src -> Z^e/N_dst induced by L."""
    if L.domain_rank != src.ambient_rank or L.codomain_rank != dst.ambient_rank:
        raise RankMismatchError("lattice map does not match the ambient lattices")
    if not (dst.projection @ L.matrix @ src.sublattice_basis).is_zero():
        raise IncompatibleSublatticesError(
            "map does not send the source sublattice into the target sublattice")
    return LatticeMap(dst.projection @ L.matrix @ src.right_inverse, src.rank, dst.rank)


def det(M: IntMatrix) -> int:
    if M.rows != M.cols:
        raise RankMismatchError("determinant of a non-square matrix")
    return bareiss_det(M.to_lists())


def bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    a = [list(r) for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def isogeny_degree(L: LatticeMap) -> int | None:
    """Order of the cokernel of an injective square map; None if not injective."""
    if L.domain_rank != L.codomain_rank:
        raise RankMismatchError("isogeny degree needs equal ranks")
    return abs(det(L.matrix)) or None


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        raise LatticeError("zero vector has no primitive form")
    return tuple(x // g for x in v)


def is_primitive(v: Sequence[int]) -> bool:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g == 1


def is_unimodular_basis(vectors: Sequence[Sequence[int]], d: int) -> bool:
    """True when the vectors extend to a basis of Z^d."""
    if not vectors:
        return True
    dec = snf(IntMatrix.from_cols(vectors, d))
    return dec.rank == len(vectors) and all(x == 1 for x in dec.diagonal)
