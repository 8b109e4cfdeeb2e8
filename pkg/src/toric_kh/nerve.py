"""Čech nerve of the maximal-cone cover and its torus pieces.

Level p of the nerve holds one cell per (p+1)-tuple of maximal cones; each cell
carries the intersection cone τ and the lattice Ñ_τ = N / N_τ presenting the
torus piece of U_τ.  Face maps are induced by the identity of N.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .fan import Cone, Fan, FanError, FanIsomorphism, is_complete
from .lattice import (IntMatrix, LatticeMap, QuotientPresentation, induced_quotient_map,
                      isogeny_degree, quotient_presentation)


class NerveMode(str, Enum):
    FULL = "full"
    ALTERNATING = "alternating"


class NotIsogenyError(ArithmeticError):
    """A cell map of the torus-piece morphism failed to be injective."""


@dataclass(frozen=True)
class NerveCell:
    tuple: tuple[int, ...]
    intersection_cone: Cone
    torus_rank: int

    @property
    def level(self) -> int:
        return len(self.tuple) - 1

    @property
    def char_lattice_rank(self) -> int:
        return self.torus_rank


@dataclass
class Nerve:
    fan: Fan
    mode: NerveMode
    levels: list[list[NerveCell]]
    presentations: dict[Cone, QuotientPresentation] = field(repr=False)
    _index: dict[tuple[int, ...], NerveCell] = field(default_factory=dict, repr=False)

    @property
    def p_max(self) -> int:
        return len(self.levels) - 1

    def cell(self, t: Sequence[int]) -> NerveCell:
        t = tuple(t)
        found = self._index.get(t)
        if found is None:
            found = _make_cell(self.fan, t, self.presentations)
        return found

    def presentation(self, cell: NerveCell) -> QuotientPresentation:
        return self.presentations[cell.intersection_cone]


def torus_piece(fan: Fan, cone: Cone) -> QuotientPresentation:
    return quotient_presentation(fan.generator_matrix(cone), fan.dim)


def intersection_cone(fan: Fan, t: Sequence[int]) -> Cone:
    common = set(fan.max_cones[t[0]].ray_indices)
    for i in t[1:]:
        common &= set(fan.max_cones[i].ray_indices)
    return Cone(tuple(sorted(common)))


def _make_cell(fan: Fan, t: tuple[int, ...], cache: dict[Cone, QuotientPresentation]) -> NerveCell:
    tau = intersection_cone(fan, t)
    if tau not in cache:
        cache[tau] = torus_piece(fan, tau)
    return NerveCell(t, tau, cache[tau].rank)


def build_nerve(fan: Fan, mode: NerveMode | str = NerveMode.ALTERNATING, p_max: int | None = None) -> Nerve:
    mode = NerveMode(mode)
    if not is_complete(fan):
        raise FanError("the nerve is built for complete fans only")
    m = len(fan.max_cones)
    if p_max is None:
        p_max = m - 1
    if mode is NerveMode.ALTERNATING:
        p_max = min(p_max, m - 1)
    cache: dict[Cone, QuotientPresentation] = {}
    levels = []
    for p in range(p_max + 1):
        if mode is NerveMode.ALTERNATING:
            tuples = itertools.combinations(range(m), p + 1)
        else:
            tuples = itertools.product(range(m), repeat=p + 1)
        levels.append([_make_cell(fan, t, cache) for t in tuples])
    nerve = Nerve(fan, mode, levels, cache)
    nerve._index.update((c.tuple, c) for lvl in levels for c in lvl)
    return nerve


def _as_cell(nerve: Nerve, cell: NerveCell | Sequence[int]) -> NerveCell:
    return cell if isinstance(cell, NerveCell) else nerve.cell(cell)


def face_tuple(t: Sequence[int], j: int) -> tuple[int, ...]:
    if not 0 <= j < len(t) or len(t) < 2:
        raise IndexError(f"face index {j} out of range for level-{len(t) - 1} cell")
    return tuple(t[:j]) + tuple(t[j + 1:])


def degeneracy_tuple(t: Sequence[int], j: int) -> tuple[int, ...]:
    if not 0 <= j < len(t):
        raise IndexError(f"degeneracy index {j} out of range for level-{len(t) - 1} cell")
    return tuple(t[:j + 1]) + tuple(t[j:])


def face_map(nerve: Nerve, cell: NerveCell | Sequence[int], j: int) -> LatticeMap:
    """Ñ_τ -> Ñ_{τ_j}: lift to N, then project."""
    cell = _as_cell(nerve, cell)
    target = nerve.cell(face_tuple(cell.tuple, j))
    d = nerve.fan.dim
    return induced_quotient_map(LatticeMap.of(IntMatrix.identity(d)),
                                nerve.presentation(cell), nerve.presentation(target))


def degeneracy_map(nerve: Nerve, cell: NerveCell | Sequence[int], j: int) -> LatticeMap:
    cell = _as_cell(nerve, cell)
    target = nerve.cell(degeneracy_tuple(cell.tuple, j))
    d = nerve.fan.dim
    return induced_quotient_map(LatticeMap.of(IntMatrix.identity(d)),
                                nerve.presentation(cell), nerve.presentation(target))


def character_inclusion(nerve: Nerve, cell: NerveCell | Sequence[int], j: int) -> IntMatrix:
    """M_{τ_j} -> M_τ, the dual of the face map in the dual bases."""
    return face_map(nerve, cell, j).matrix.T


# -- simplicial identities ---------------------------------------------------

@dataclass
class IdentityCheck:
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_simplicial_identities(nerve: Nerve) -> IdentityCheck:
    """Check the face/degeneracy identities as exact matrix equations.

    Maps are covariant on Ñ, so a composite "first a, then b" is b.matrix @ a.matrix.
    """
    out = IdentityCheck()

    def expect(lhs: tuple, rhs: tuple, what: str):
        out.checked += 1
        if lhs != rhs:
            out.failures.append(what)

    def run(steps, t):
        m = None
        for kind, j in steps:
            f = face_map if kind == "d" else degeneracy_map
            step = f(nerve, t, j).matrix
            m = step if m is None else step @ m
            t = face_tuple(t, j) if kind == "d" else degeneracy_tuple(t, j)
        return t, m

    for lvl in nerve.levels:
        for cell in lvl:
            t, n = cell.tuple, cell.level
            # d_i d_j = d_{j-1} d_i for i < j
            if n >= 2:
                for j in range(n + 1):
                    for i in range(j):
                        expect(run([("d", j), ("d", i)], t), run([("d", i), ("d", j - 1)], t),
                               f"d{i}d{j} at {t}")
            # s_i s_j = s_{j+1} s_i for i <= j
            for j in range(n + 1):
                for i in range(j + 1):
                    expect(run([("s", j), ("s", i)], t), run([("s", i), ("s", j + 1)], t),
                           f"s{i}s{j} at {t}")
            # mixed identities
            for j in range(n + 1):
                for i in range(n + 2):
                    lhs = run([("s", j), ("d", i)], t)
                    if i < j:
                        rhs = run([("d", i), ("s", j - 1)], t) if n >= 1 else None
                    elif i in (j, j + 1):
                        rhs = (t, IntMatrix.identity(cell.torus_rank))
                    else:
                        rhs = run([("d", i - 1), ("s", j)], t) if n >= 1 else None
                    if rhs is not None:
                        expect(lhs, rhs, f"d{i}s{j} at {t}")
    return out


# -- morphisms between nerves ------------------------------------------------

@dataclass
class CellMap:
    source: tuple[int, ...]
    target: tuple[int, ...]
    map: LatticeMap
    degree: int


@dataclass
class BotMorphism:
    cell_maps: dict[tuple[int, ...], CellMap]
    commutation_checked: int

    def degree_table(self) -> list[tuple[tuple[int, ...], tuple[int, ...], int, int]]:
        return [(c.source, c.target, c.map.domain_rank, c.degree) for c in self.cell_maps.values()]


def _image_tuple(nerveY: Nerve, cone_map: Sequence[int], t: Sequence[int]) -> tuple[int, ...]:
    img = tuple(cone_map[i] for i in t)
    return tuple(sorted(img)) if nerveY.mode is NerveMode.ALTERNATING else img


def maximal_cone_map(fanX: Fan, fanY: Fan, iso: FanIsomorphism) -> tuple[int, ...]:
    lookup = {c: k for k, c in enumerate(fanY.max_cones)}
    return tuple(lookup[iso.cone_map(c)] for c in fanX.max_cones)


def bot_morphism(nerveX: Nerve, nerveY: Nerve, iso: FanIsomorphism | LatticeMap,
                 cone_map: Sequence[int] | None = None) -> BotMorphism:
    """Cell-by-cell maps Ñ^X_τ -> Ñ^Y_{φ(τ)} induced by F, each certified as an isogeny."""
    if nerveX.mode is not nerveY.mode:
        raise ValueError("nerves must be built in the same mode")
    if isinstance(iso, FanIsomorphism):
        F = iso.matrix
        if cone_map is None:
            cone_map = maximal_cone_map(nerveX.fan, nerveY.fan, iso)
    else:
        F = iso
        if cone_map is None:
            cone_map = tuple(range(len(nerveX.fan.max_cones)))
    maps: dict[tuple[int, ...], CellMap] = {}
    for lvl in nerveX.levels:
        for cell in lvl:
            tgt = nerveY.cell(_image_tuple(nerveY, cone_map, cell.tuple))
            L = induced_quotient_map(F, nerveX.presentation(cell), nerveY.presentation(tgt))
            deg = isogeny_degree(L)
            if deg is None:
                raise NotIsogenyError(f"cell map at {cell.tuple} is not injective")
            maps[cell.tuple] = CellMap(cell.tuple, tgt.tuple, L, deg)

    checked = 0
    for t, cm in maps.items():
        if len(t) < 2:
            continue
        for j in range(len(t)):
            ft = face_tuple(t, j)
            if ft not in maps:
                continue
            # the j-th face of the Y cell is the one omitting the image of t[j]
            tgt = cm.target
            if nerveY.mode is NerveMode.ALTERNATING:
                jy = tgt.index(cone_map[t[j]])
            else:
                jy = j
            lhs = maps[ft].map.matrix @ face_map(nerveX, t, j).matrix
            rhs = face_map(nerveY, tgt, jy).matrix @ cm.map.matrix
            if lhs != rhs:
                raise ArithmeticError(f"cell maps do not commute with face {j} at {t}")
            checked += 1
    return BotMorphism(maps, checked)
