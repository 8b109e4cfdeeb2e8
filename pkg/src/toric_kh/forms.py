"""Multigraded Čech complexes of j-forms over affine semigroup charts.

Forms are written in the log basis: x^a dlog x_S has multidegree a.  The wedge
d(x^a_1) ∧ ... ∧ d(x^a_j) equals x^(a_1+...+a_j) times Σ_S det(a_·,S) dlog x_S,
so a module generated by such wedges over k[S] has, in each multidegree μ, a
finite-dimensional slice spanned by minor vectors in Q^C(d, j).  Restriction
maps between charts become inclusions of these coefficient subspaces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import rational
from .fan import (Cone, Fan, FanError, UnsupportedDimensionError, cone_coefficients,
                  dual_semigroup_generators, in_dual_cone, is_complete)
from .nerve import face_tuple, intersection_cone

Vector = tuple[int, ...]

PAPER_BOUND = 50


class GeneratorMode(str, Enum):
    PAPER_LIST = "paper"
    HILBERT = "hilbert"


class WitnessVerdict(str, Enum):
    IN_IMAGE = "IN_IMAGE"
    NONZERO_CLASS = "NONZERO_CLASS"


class UnknownPaperChartError(FanError):
    pass


def _e(i: int, d: int, sign: int = 1) -> Vector:
    return tuple(sign * int(k == i) for k in range(d))


# Chart rings of P(1,1,2,4) as listed with the H^3(Ω^2) computation, keyed by ray.
PAPER_CHARTS: dict[Vector, tuple[Vector, ...]] = {
    (1, 0, 0): ((1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)),
    (0, 1, 0): ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, -1)),
    (0, 0, 1): ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1)),
    (-1, -2, -4): ((-1, 0, 0), (0, -1, 0), (0, 0, -1), (-4, 0, 1), (0, -2, 1)),
}


def laurent_generators(d: int) -> tuple[Vector, ...]:
    return tuple(v for i in range(d) for v in (_e(i, d), _e(i, d, -1)))


def log_subsets(d: int, j: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(d), j))


def wedge_log_form(monomials: Sequence[Sequence[int]], d: int) -> tuple[Vector, list[int]]:
    """Log-degree and log-basis coefficients of d(x^a_1) ∧ ... ∧ d(x^a_j)."""
    j = len(monomials)
    deg = tuple(sum(m[i] for m in monomials) for i in range(d))
    if j == 0:
        return deg, [1]
    coeffs = [int(rational.det([[m[i] for i in S] for m in monomials])) for S in log_subsets(d, j)]
    return deg, coeffs


def naive_exponent(log_degree: Sequence[int], S: Sequence[int]) -> Vector:
    """Exponent of the coefficient of dx_S once x^a dlog x_S is rewritten as x^(a - e_S) dx_S."""
    return tuple(a - (1 if i in S else 0) for i, a in enumerate(log_degree))


@dataclass(frozen=True)
class MonomialModule:
    ambient_dim: int
    form_degree: int
    ring_generators: tuple[Vector, ...]
    wedge_generators: tuple[tuple[Vector, ...], ...]
    mode: GeneratorMode
    cone_vectors: tuple[Vector, ...] = ()
    label: str = ""

    def contains_monomial(self, m: Sequence[int]) -> tuple[bool, bool]:
        """(member, truncated).  ``truncated`` flags a bounded search that gave up
        while a rational representation exists."""
        m = tuple(m)
        if self.mode is GeneratorMode.HILBERT:
            return in_dual_cone(self.cone_vectors, m), False
        return _bounded_member(self.ring_generators, m, PAPER_BOUND)


@lru_cache(maxsize=None)
def _bounded_member(gens: tuple[Vector, ...], m: Vector, bound: int) -> tuple[bool, bool]:
    d = len(m)
    if not any(m):
        return True, False
    if not _in_rational_cone(gens, m):
        return False, False
    # a maximal independent subset fixes the remaining coefficients
    basis: list[int] = []
    for i in range(len(gens)):
        if rational.rank([gens[k] for k in basis + [i]]) > len(basis):
            basis.append(i)
    extra = [i for i in range(len(gens)) if i not in basis]
    B = [[gens[b][r] for b in basis] for r in range(d)]
    for combo in _compositions_upto(len(extra), bound):
        rest = [m[r] - sum(c * gens[e][r] for c, e in zip(combo, extra)) for r in range(d)]
        x = rational.solve(B, rest)
        if x is None:
            continue
        if all(v >= 0 and v.denominator == 1 for v in x) and sum(x) + sum(combo) <= bound:
            return True, False
    return False, True


def _compositions_upto(k: int, bound: int):
    if k == 0:
        yield ()
        return
    for first in range(bound + 1):
        for rest in _compositions_upto(k - 1, bound - first):
            yield (first,) + rest


def _in_rational_cone(gens: Sequence[Vector], m: Vector) -> bool:
    # Carathéodory: some independent subset carries m with nonnegative coefficients
    r = rational.rank(gens)
    for sub in itertools.combinations(gens, r):
        if rational.rank(sub) < r:
            continue
        c = cone_coefficients(sub, m)
        if c is not None and all(x >= 0 for x in c):
            return True
    return False


def _module(d: int, j: int, gens: Sequence[Vector], mode: GeneratorMode,
            cone_vectors: Sequence[Vector], label: str) -> MonomialModule:
    gens = tuple(sorted(set(tuple(g) for g in gens)))
    wedges = tuple(w for w in itertools.combinations(gens, j) if any(wedge_log_form(w, d)[1]))
    return MonomialModule(d, j, gens, wedges, mode, tuple(tuple(v) for v in cone_vectors), label)


def paper_chart_generators(fan: Fan, cone: Cone) -> tuple[Vector, ...] | None:
    if cone.dim == 0:
        return laurent_generators(fan.dim)
    if fan.dim == 3 and cone.dim == 1:
        return PAPER_CHARTS.get(fan.rays[cone.ray_indices[0]])
    return None


def chart_module(fan: Fan, cone: Cone, j: int,
                 generator_mode: GeneratorMode | str = GeneratorMode.HILBERT) -> MonomialModule:
    mode = GeneratorMode(generator_mode)
    d = fan.dim
    if d > 3:
        raise UnsupportedDimensionError("chart modules are supported for d <= 3")
    if not 0 <= j <= d:
        raise ValueError(f"form degree {j} out of range for d = {d}")
    vecs = fan.vectors(cone)
    label = f"cone{cone.ray_indices}"
    if mode is GeneratorMode.PAPER_LIST:
        gens = paper_chart_generators(fan, cone)
        if gens is None:
            raise UnknownPaperChartError(f"no listed chart ring for cone {cone.ray_indices}")
        return _module(d, j, gens, mode, vecs, label)
    return _module(d, j, dual_semigroup_generators(fan, cone), mode, vecs, label)


@dataclass(frozen=True)
class GradedPiece:
    """Basis (in reduced row echelon form) of a module's μ-slice in Q^C(d, j)."""

    mu: Vector
    basis: tuple[tuple[Fraction, ...], ...]
    pivots: tuple[int, ...]
    warnings: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coordinates(self, v: Sequence) -> list[Fraction] | None:
        """Coordinates of v in this basis, or None if v is outside the slice."""
        coords = [Fraction(v[p]) for p in self.pivots]
        recon = [sum((c * b[i] for c, b in zip(coords, self.basis)), Fraction(0)) for i in range(len(v))]
        return coords if recon == [Fraction(x) for x in v] else None


def _piece(mu: Vector, vectors: list, warnings=()) -> GradedPiece:
    red, piv = rational.rref(vectors) if vectors else ([], [])
    return GradedPiece(mu, tuple(tuple(r) for r in red), tuple(piv), tuple(warnings))


def graded_slice(module: MonomialModule, mu: Sequence[int]) -> GradedPiece:
    mu = tuple(mu)
    d = module.ambient_dim
    vecs, warnings = [], []
    for w in module.wedge_generators:
        deg, coeffs = wedge_log_form(w, d)
        nu = tuple(a - b for a, b in zip(mu, deg))
        member, truncated = module.contains_monomial(nu)
        if member:
            vecs.append(coeffs)
        elif truncated:
            warnings.append(f"membership of {nu} in {module.label} undecided within coefficient sum "
                            f"{PAPER_BOUND}; slice may be incomplete")
    return _piece(mu, vecs, warnings)


def _intersect(a: GradedPiece, b: GradedPiece) -> GradedPiece:
    if not a.basis or not b.basis:
        return GradedPiece(a.mu, (), (), a.warnings + b.warnings)
    # solve Σ x_i a_i = Σ y_k b_k
    n = len(a.basis[0])
    cols = [list(v) for v in a.basis] + [[-x for x in v] for v in b.basis]
    A = [[c[i] for c in cols] for i in range(n)]
    vecs = []
    for z in rational.nullspace(A, len(cols)):
        vecs.append([sum((z[k] * a.basis[k][i] for k in range(len(a.basis))), Fraction(0)) for i in range(n)])
    return _piece(a.mu, vecs, a.warnings + b.warnings)


# -- Čech complexes ----------------------------------------------------------

@dataclass
class GradedCechComplex:
    fan: Fan
    form_degree: int
    mu: Vector
    mode: GeneratorMode
    # terms[p]: list of (cell tuple, intersection cone, slice)
    terms: list[list[tuple[tuple[int, ...], Cone, GradedPiece]]]
    differentials: list[list[list[Fraction]]]
    warnings: list[str] = field(default_factory=list)

    def dims(self) -> list[int]:
        return [sum(piece.dim for _, _, piece in t) for t in self.terms]

    def cohomology_ranks(self) -> list[int]:
        dims = self.dims()
        ranks = [rational.rank(m) if m and m[0] else 0 for m in self.differentials]
        return [dims[p] - (ranks[p] if p < len(ranks) else 0) - (ranks[p - 1] if p else 0)
                for p in range(len(dims))]

    def is_cochain_complex(self) -> bool:
        for p in range(len(self.differentials) - 1):
            d0, d1 = self.differentials[p], self.differentials[p + 1]
            if not d0 or not d1 or not d0[0]:
                continue
            if any(x for row in rational.matmul(d1, d0, inner=len(d0)) for x in row):
                return False
        return True

    @property
    def top_piece(self) -> GradedPiece:
        return self.terms[-1][0][2]


def cone_slice(fan: Fan, cone: Cone, j: int, mu: Sequence[int],
               mode: GeneratorMode, notes: list[str] | None = None) -> GradedPiece:
    """μ-slice of the chart module of ``cone`` used in the Čech complex.

    PAPER_LIST mode uses the listed ring where one exists.  Other cones get the
    full chart module cut down to forms that restrict into every listed chart
    on their faces, so restriction maps stay inclusions.
    """
    mu = tuple(mu)
    if mode is GeneratorMode.HILBERT:
        return graded_slice(chart_module(fan, cone, j, GeneratorMode.HILBERT), mu)
    if paper_chart_generators(fan, cone) is not None:
        return graded_slice(chart_module(fan, cone, j, GeneratorMode.PAPER_LIST), mu)
    piece = graded_slice(chart_module(fan, cone, j, GeneratorMode.HILBERT), mu)
    listed = [f for f in cone.faces() if f.dim and paper_chart_generators(fan, f) is not None]
    for f in listed:
        piece = _intersect(piece, graded_slice(chart_module(fan, f, j, GeneratorMode.PAPER_LIST), mu))
    if notes is not None and cone.dim == 1:
        notes.append(f"no listed chart for ray {fan.rays[cone.ray_indices[0]]}; using its full dual semigroup")
    return piece


def graded_cech_complex(fan: Fan, j: int, mu: Sequence[int],
                        generator_mode: GeneratorMode | str = GeneratorMode.PAPER_LIST) -> GradedCechComplex:
    mode = GeneratorMode(generator_mode)
    if fan.dim > 3:
        raise UnsupportedDimensionError("graded form complexes are supported for d <= 3")
    if not is_complete(fan):
        raise FanError("graded form complexes need a complete fan")
    mu = tuple(int(x) for x in mu)
    if len(mu) != fan.dim:
        raise ValueError(f"multidegree {mu} does not live in Z^{fan.dim}")
    m = len(fan.max_cones)
    notes: list[str] = []
    cache: dict[Cone, GradedPiece] = {}
    terms = []
    for p in range(m):
        level = []
        for t in itertools.combinations(range(m), p + 1):
            tau = intersection_cone(fan, t)
            if tau not in cache:
                cache[tau] = cone_slice(fan, tau, j, mu, mode, notes)
            level.append((t, tau, cache[tau]))
        terms.append(level)

    diffs = []
    for p in range(m - 1):
        src_off, off = {}, 0
        for t, _, piece in terms[p]:
            src_off[t] = off
            off += piece.dim
        n_src = off
        rows = []
        for t, _, piece in terms[p + 1]:
            block = [[Fraction(0)] * n_src for _ in range(piece.dim)]
            for k in range(len(t)):
                s = face_tuple(t, k)
                src_piece = next(pc for tt, _, pc in terms[p] if tt == s)
                sign = -1 if k % 2 else 1
                for b, vec in enumerate(src_piece.basis):
                    coords = piece.coordinates(vec)
                    if coords is None:
                        raise ArithmeticError(f"restriction from {s} to {t} leaves the target slice")
                    for a, c in enumerate(coords):
                        block[a][src_off[s] + b] += sign * c
            rows.extend(block)
        diffs.append(rows)
    warnings = sorted(set(notes) | {w for cx in cache.values() for w in cx.warnings})
    return GradedCechComplex(fan, j, mu, mode, terms, diffs, warnings)


def top_cokernel_witness(cx: GradedCechComplex, class_vector: Sequence) -> WitnessVerdict:
    """Decide whether ``class_vector`` (log-basis coefficients at the complex's
    multidegree) is a coboundary in the top Čech degree."""
    if not any(class_vector):
        return WitnessVerdict.IN_IMAGE
    top = cx.top_piece
    coords = top.coordinates(class_vector)
    if coords is None:
        raise ValueError("class vector does not lie in the top term")
    if not cx.differentials:
        return WitnessVerdict.NONZERO_CLASS
    D = cx.differentials[-1]
    if not D or not D[0]:
        return WitnessVerdict.NONZERO_CLASS
    return WitnessVerdict.IN_IMAGE if rational.solve(D, coords) is not None else WitnessVerdict.NONZERO_CLASS
