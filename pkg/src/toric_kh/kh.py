"""Rational homotopy K-theory of complete simplicial toric varieties.

K_n(R[Z^r]) ⊗ Q splits over weights s as C(r, s) copies of K_{n-s}(R) ⊗ Q, and
a lattice map acts on the weight-s part through its s-th exterior power.  KH of
the variety is assembled from the Čech cohomology of the torus-piece cover,
one rational cochain complex per weight.  K_*(R) itself is never evaluated:
answers are multiplicities of the formal symbols κ_j = K_j(R) ⊗ Q.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

from . import rational
from .fan import Fan, rational_fan_isomorphism
from .lattice import LatticeMap, RankMismatchError, det as int_det
from .nerve import (BotMorphism, Nerve, NerveMode, bot_morphism, build_nerve,
                    character_inclusion, face_tuple)

E2_ASSEMBLY = ("E2 assembly: KH_n ⊗ Q is read off the E2 page of the Bousfield-Kan "
               "spectral sequence, assumed to degenerate rationally")


class NotInjectiveError(ArithmeticError):
    pass


@dataclass(frozen=True)
class KTorusDecomposition:
    rank: int
    weights: tuple[tuple[int, int], ...]


def torus_k_decomposition(r: int) -> KTorusDecomposition:
    if r < 0:
        raise ValueError("torus rank must be nonnegative")
    return KTorusDecomposition(r, tuple((s, comb(r, s)) for s in range(r + 1)))


def exterior_power(A: Sequence[Sequence], s: int, nrows: int | None = None,
                   ncols: int | None = None) -> list[list[Fraction]]:
    """Λ^s A on increasing s-subset bases: entries are s×s minors."""
    if s < 0:
        raise ValueError("exterior degree must be nonnegative")
    if nrows is None:
        nrows = len(A)
    if ncols is None:
        ncols = len(A[0]) if nrows else 0
    if s == 0:
        return [[Fraction(1)]]
    return rational.minors(A, s, nrows, ncols)


# -- weight complexes --------------------------------------------------------

@dataclass
class WeightComplex:
    weight: int
    # terms[p] lists (cell tuple, s-subset of the cell's character basis)
    terms: list[list[tuple[tuple[int, ...], tuple[int, ...]]]]
    # differentials[p]: C^p -> C^{p+1}, dense rows indexed by C^{p+1}
    differentials: list[list[list[Fraction]]]

    def dims(self) -> list[int]:
        return [len(t) for t in self.terms]


def _alternating_cells(nerve: Nerve, p: int) -> list:
    return nerve.levels[p] if p < len(nerve.levels) else []


def _normalized_cells(nerve: Nerve, p: int) -> list:
    return [c for c in _alternating_cells(nerve, p)
            if all(a != b for a, b in zip(c.tuple, c.tuple[1:]))]


def build_weight_complex(nerve: Nerve, s: int) -> WeightComplex:
    """Čech complex C^p = ⊕_cells Λ^s M_τ with the alternating-sum differential.

    On a FULL nerve this is the normalized complex (cochains vanishing on
    degenerate tuples), truncated at the nerve's top level.
    """
    cells_at = _normalized_cells if nerve.mode is NerveMode.FULL else _alternating_cells
    P = len(nerve.levels)
    levels = [cells_at(nerve, p) for p in range(P)]
    terms, offsets = [], []
    for cells in levels:
        basis, off = [], {}
        for c in cells:
            off[c.tuple] = len(basis)
            basis.extend((c.tuple, S) for S in combinations(range(c.char_lattice_rank), s))
        terms.append(basis)
        offsets.append(off)

    diffs = []
    for p in range(P - 1):
        rows = [[Fraction(0)] * len(terms[p]) for _ in terms[p + 1]]
        for c in levels[p + 1]:
            r0 = offsets[p + 1][c.tuple]
            for j in range(len(c.tuple)):
                src = face_tuple(c.tuple, j)
                if src not in offsets[p]:
                    continue  # degenerate face in the normalized complex
                c0 = offsets[p][src]
                inc = character_inclusion(nerve, c, j)
                blk = exterior_power(inc.to_lists(), s, inc.rows, inc.cols)
                sign = -1 if j % 2 else 1
                for a, row in enumerate(blk):
                    for b, x in enumerate(row):
                        if x:
                            rows[r0 + a][c0 + b] += sign * x
        diffs.append(rows)
    return WeightComplex(s, terms, diffs)


def is_cochain_complex(wc: WeightComplex) -> bool:
    for p in range(len(wc.differentials) - 1):
        d0, d1 = wc.differentials[p], wc.differentials[p + 1]
        if not d0 or not d1 or not d0[0]:
            continue
        prod = rational.matmul(d1, d0, inner=len(d0))
        if any(x for row in prod for x in row):
            return False
    return True


def cohomology_ranks(wc: WeightComplex, top: int | None = None) -> list[int]:
    """rank H^p = dim C^p - rank d^p - rank d^{p-1}.

    ``top`` restricts the output to H^0..H^{top-1}; the last level of a
    truncated complex has no outgoing differential and is then excluded.
    """
    dims = wc.dims()
    ranks = [rational.rank(d) if d and d[0] else 0 for d in wc.differentials]
    out = []
    n = len(dims) if top is None else top
    for p in range(n):
        r_out = ranks[p] if p < len(ranks) else 0
        r_in = ranks[p - 1] if p >= 1 else 0
        out.append(dims[p] - r_out - r_in)
    return out


# -- multiplicities ----------------------------------------------------------

@dataclass
class MultiplicityVector:
    """KH_n ⊗ Q ≅ ⊕_o κ_{n-o}^{mult[o]}."""

    mult: dict[int, int]
    table: list[tuple[int, int, int]] = field(default_factory=list)  # (s, p, rank H^p)
    assumptions: tuple[str, ...] = (E2_ASSEMBLY,)

    def as_dict(self) -> dict[str, int]:
        return {str(o): m for o, m in sorted(self.mult.items())}

    def __eq__(self, other):
        if isinstance(other, MultiplicityVector):
            return self.mult == other.mult
        if isinstance(other, dict):
            return self.mult == other
        return NotImplemented


def kh_multiplicities(fan: Fan, nerve: Nerve | None = None) -> MultiplicityVector:
    if nerve is None:
        nerve = build_nerve(fan, NerveMode.ALTERNATING)
    mult: dict[int, int] = defaultdict(int)
    table = []
    for s in range(fan.dim + 1):
        wc = build_weight_complex(nerve, s)
        for p, r in enumerate(cohomology_ranks(wc)):
            table.append((s, p, r))
            if r:
                mult[s - p] += r
    return MultiplicityVector(dict(sorted(mult.items())), table)


@dataclass
class AutomorphismReport:
    rank: int
    determinant: int
    weight_determinants: dict[int, Fraction]
    diagonal_scalings: dict[int, list[int]] | None

    @property
    def invertible(self) -> bool:
        return all(v != 0 for v in self.weight_determinants.values())


def verify_isogeny_k_automorphism(alpha: LatticeMap) -> AutomorphismReport:
    """Check that every weight-s action Λ^s(α) of an injective α is invertible over Q."""
    if alpha.domain_rank != alpha.codomain_rank:
        raise RankMismatchError("α must be square")
    r = alpha.domain_rank
    D = int_det(alpha.matrix)
    if D == 0:
        raise NotInjectiveError("α is not injective (determinant 0)")
    A = alpha.matrix.to_lists()
    dets = {s: rational.det(exterior_power(A, s, r, r)) for s in range(r + 1)}
    diag = None
    if all(A[i][j] == 0 for i in range(r) for j in range(r) if i != j):
        diag = {}
        for s in range(r + 1):
            scal = []
            for S in combinations(range(r), s):
                v = 1
                for i in S:
                    v *= A[i][i]
                scal.append(v)
            diag[s] = scal
    return AutomorphismReport(r, D, dets, diag)


@dataclass
class KHComparison:
    equal: bool
    vector: MultiplicityVector
    vector_y: MultiplicityVector
    isomorphism: object
    morphism: BotMorphism

    def degree_table(self):
        return self.morphism.degree_table()


def compare_kh(fanX: Fan, fanY: Fan) -> KHComparison | None:
    """Run the rational-isomorphism pipeline; None when no isomorphism exists."""
    iso = rational_fan_isomorphism(fanX, fanY)
    if iso is None:
        return None
    nx = build_nerve(fanX, NerveMode.ALTERNATING)
    ny = build_nerve(fanY, NerveMode.ALTERNATING)
    morph = bot_morphism(nx, ny, iso)
    vx = kh_multiplicities(fanX, nx)
    vy = kh_multiplicities(fanY, ny)
    return KHComparison(vx.mult == vy.mult, vx, vy, iso, morph)
