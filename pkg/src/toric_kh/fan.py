"""Complete simplicial fans: construction, validation and local geometry."""

from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from . import rational
from .lattice import (IntMatrix, LatticeMap, hnf_rows, is_primitive, is_unimodular_basis,
                      primitive, quotient_presentation, snf)

Vector = tuple[int, ...]


class FanError(ValueError):
    pass


class InvalidWeightsError(FanError):
    pass


class FanValidationError(FanError):
    def __init__(self, violation: FanViolation):
        super().__init__(violation.message)
        self.violation = violation


class RayOutsideSupportError(FanError):
    pass


class DuplicateRayError(FanError):
    pass


class NotARayError(FanError):
    pass


class UnsupportedDimensionError(FanError):
    pass


@dataclass(frozen=True, order=True)
class Cone:
    ray_indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ray_indices", tuple(sorted(self.ray_indices)))

    @property
    def dim(self) -> int:
        return len(self.ray_indices)

    def faces(self) -> list[Cone]:
        return [Cone(sub) for k in range(self.dim + 1)
                for sub in itertools.combinations(self.ray_indices, k)]

    def __and__(self, other: Cone) -> Cone:
        return Cone(tuple(sorted(set(self.ray_indices) & set(other.ray_indices))))

    def __contains__(self, idx: int) -> bool:
        return idx in self.ray_indices


ZERO_CONE = Cone(())


@dataclass(frozen=True)
class Fan:
    dim: int
    rays: tuple[Vector, ...]
    max_cones: tuple[Cone, ...]
    label: str | None = None
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @classmethod
    def build(cls, dim: int, rays: Iterable[Sequence[int]], max_cones: Iterable[Iterable[int]],
              label: str | None = None, warnings: Sequence[str] = ()) -> Fan:
        return cls(dim, tuple(tuple(int(x) for x in r) for r in rays),
                   tuple(Cone(tuple(c)) for c in max_cones), label, tuple(warnings))

    def vectors(self, cone: Cone) -> list[Vector]:
        return [self.rays[i] for i in cone.ray_indices]

    def generator_matrix(self, cone: Cone) -> IntMatrix:
        return IntMatrix.from_cols(self.vectors(cone), self.dim)

    def all_cones(self) -> list[Cone]:
        """Every face of every maximal cone, ordered by dimension then indices."""
        seen = {f for c in self.max_cones for f in c.faces()}
        return sorted(seen, key=lambda c: (c.dim, c.ray_indices))

    def ray_index(self, v: Sequence[int]) -> int:
        try:
            return self.rays.index(tuple(v))
        except ValueError:
            raise NotARayError(f"{tuple(v)} is not a ray of the fan") from None

    def to_dict(self) -> dict:
        out = {"dim": self.dim, "rays": [list(r) for r in self.rays],
               "max_cones": [list(c.ray_indices) for c in self.max_cones]}
        if self.label:
            out["label"] = self.label
        return out


@dataclass(frozen=True)
class FanViolation:
    kind: str
    message: str
    witnesses: tuple = ()


@dataclass(frozen=True)
class SingularityReport:
    singular_cones: tuple[Cone, ...]
    singular_locus_dim: int

    @property
    def smooth(self) -> bool:
        return not self.singular_cones


@dataclass(frozen=True)
class FanIsomorphism:
    """A rational linear isomorphism carrying fan X onto fan Y.

    ``ray_map[i]`` is the Y-ray hit by X-ray i; ``scalings[i]`` is the positive
    rational with ``F_Q u_i = scalings[i] v_{ray_map[i]}``.  ``matrix`` is F_Q with
    denominators cleared to a primitive integral matrix.
    """

    matrix: LatticeMap
    rational_matrix: tuple[tuple[Fraction, ...], ...]
    ray_map: tuple[int, ...]
    scalings: tuple[Fraction, ...]

    def cone_map(self, cone: Cone) -> Cone:
        return Cone(tuple(self.ray_map[i] for i in cone.ray_indices))


# -- constructors ------------------------------------------------------------

def _all_d_subsets(n_rays: int, d: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(n_rays), d))


def make_projective_space_fan(d: int) -> Fan:
    if d < 1:
        raise FanError("projective space needs d >= 1")
    rays = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    rays.append(tuple(-1 for _ in range(d)))
    return Fan.build(d, rays, _all_d_subsets(d + 1, d), label=f"P^{d}")


def is_well_formed(q: Sequence[int]) -> bool:
    """No d of the d+1 weights share a common factor."""
    return all(gcd(*sub) == 1 for sub in itertools.combinations(q, len(q) - 1))


def make_wps_fan(q: Sequence[int]) -> Fan:
    q = [int(x) for x in q]
    if len(q) < 2:
        raise InvalidWeightsError("need at least two weights")
    if any(x <= 0 for x in q):
        raise InvalidWeightsError(f"weights must be positive: {q}")
    if gcd(*q) != 1:
        raise InvalidWeightsError(f"weights must have gcd 1: {q}")
    d = len(q) - 1
    warnings = []
    if not is_well_formed(q):
        warnings.append(f"weights {tuple(q)} are not well-formed; rays were primitivized")
    if q[0] == 1:
        # u_i = e_i for i >= 1 and u_0 = -(q_1 e_1 + ... + q_d e_d), listed last
        rays = [tuple(int(i == j) for j in range(d)) for i in range(d)]
        rays.append(primitive([-x for x in q[1:]]))
    else:
        dec = snf(IntMatrix.from_cols([q], d + 1))
        proj = IntMatrix.from_rows(hnf_rows(dec.U.select_rows(range(1, d + 1)).to_lists(), d + 1), d + 1)
        rays = [primitive(proj.col(i)) for i in range(d + 1)]
    label = "P(" + ",".join(map(str, q)) + ")"
    return Fan.build(d, rays, _all_d_subsets(d + 1, d), label=label, warnings=warnings)


# -- cone arithmetic ---------------------------------------------------------

def cone_coefficients(vectors: Sequence[Sequence[int]], point: Sequence) -> list[Fraction] | None:
    """Coefficients of ``point`` in the (independent) generators, or None if outside their span."""
    if not vectors:
        return [] if not any(point) else None
    a = [[v[i] for v in vectors] for i in range(len(point))]
    return rational.solve(a, list(point))


def cone_contains(vectors: Sequence[Sequence[int]], point: Sequence) -> bool:
    c = cone_coefficients(vectors, point)
    return c is not None and all(x >= 0 for x in c)


def _facet_normals(vectors: Sequence[Vector], d: int) -> list[list[Fraction]]:
    # rows of U^{-1}: x ∈ cone  <=>  U^{-1} x >= 0  (full-dimensional simplicial)
    return rational.inverse([[v[i] for v in vectors] for i in range(d)])


def _intersection_extreme_rays(A: Sequence[Vector], B: Sequence[Vector], d: int) -> list[list[Fraction]]:
    cons = _facet_normals(A, d) + _facet_normals(B, d)
    found = []
    for active in itertools.combinations(range(len(cons)), d - 1):
        rows = [cons[i] for i in active]
        ns = rational.nullspace(rows, d)
        if len(ns) != 1:
            continue
        for x in (ns[0], [-t for t in ns[0]]):
            if all(sum(h[k] * x[k] for k in range(d)) >= 0 for h in cons):
                found.append(x)
    return found


def validate_fan(fan: Fan) -> FanViolation | None:
    """First violation of the fan axioms, or None when the fan is valid."""
    d = fan.dim
    if d < 1:
        return FanViolation("dimension", "fan dimension must be >= 1")
    for i, r in enumerate(fan.rays):
        if len(r) != d:
            return FanViolation("dimension", f"ray {i} has length {len(r)}, expected {d}", (i,))
        if not any(r):
            return FanViolation("zero-ray", f"ray {i} is zero", (i,))
        if not is_primitive(r):
            return FanViolation("primitivity", f"ray {i} = {r} is not primitive", (i, r))
    dup = [r for r, n in Counter(fan.rays).items() if n > 1]
    if dup:
        return FanViolation("distinctness", f"ray {dup[0]} is listed twice", (dup[0],))
    if not fan.max_cones:
        return FanViolation("empty", "fan has no maximal cones")
    seen = set()
    for c in fan.max_cones:
        if any(i < 0 or i >= len(fan.rays) for i in c.ray_indices):
            return FanViolation("index", f"cone {c.ray_indices} references a missing ray", (c.ray_indices,))
        if len(set(c.ray_indices)) != c.dim:
            return FanViolation("index", f"cone {c.ray_indices} repeats a ray", (c.ray_indices,))
        if c.dim != d:
            return FanViolation("dimension", f"maximal cone {c.ray_indices} has dimension {c.dim}, expected {d}",
                                (c.ray_indices,))
        if rational.rank(fan.vectors(c)) != c.dim:
            return FanViolation("simpliciality", f"rays of cone {c.ray_indices} are linearly dependent",
                                (c.ray_indices,))
        if c in seen:
            return FanViolation("distinctness", f"maximal cone {c.ray_indices} is listed twice", (c.ray_indices,))
        seen.add(c)
    for c1, c2 in itertools.combinations(fan.max_cones, 2):
        common = c1 & c2
        A, B = fan.vectors(c1), fan.vectors(c2)
        normals = _facet_normals(A, d)
        for x in _intersection_extreme_rays(A, B, d):
            coeffs = [sum(h[k] * x[k] for k in range(d)) for h in normals]
            outside = [i for i, ci in zip(c1.ray_indices, coeffs) if ci != 0 and i not in common]
            if outside:
                return FanViolation(
                    "face-intersection",
                    f"cones {c1.ray_indices} and {c2.ray_indices} meet beyond their common face {common.ray_indices}",
                    (c1.ray_indices, c2.ray_indices, tuple(x)))
    return None


def check_fan(fan: Fan) -> Fan:
    v = validate_fan(fan)
    if v is not None:
        raise FanValidationError(v)
    return fan


def is_smooth_cone(fan: Fan, cone: Cone) -> bool:
    return is_unimodular_basis(fan.vectors(cone), fan.dim)


def cone_index(fan: Fan, cone: Cone) -> int:
    """Product of the invariant factors of the generator matrix (1 for smooth cones)."""
    if cone.dim == 0:
        return 1
    out = 1
    for x in snf(fan.generator_matrix(cone)).diagonal:
        out *= x
    return out


def walls(fan: Fan) -> Counter:
    return Counter(Cone(sub) for c in fan.max_cones
                   for sub in itertools.combinations(c.ray_indices, fan.dim - 1))


def is_complete(fan: Fan) -> bool:
    """Wall criterion: every wall lies on exactly two maximal cones and the
    adjacency graph of maximal cones is connected."""
    if not fan.max_cones:
        return False
    wall_count = walls(fan)
    if any(n != 2 for n in wall_count.values()):
        return False
    owners: dict[Cone, list[int]] = {}
    for k, c in enumerate(fan.max_cones):
        for sub in itertools.combinations(c.ray_indices, fan.dim - 1):
            owners.setdefault(Cone(sub), []).append(k)
    adj = {k: set() for k in range(len(fan.max_cones))}
    for a, b in owners.values():
        adj[a].add(b)
        adj[b].add(a)
    reached, todo = {0}, deque([0])
    while todo:
        for nb in adj[todo.popleft()]:
            if nb not in reached:
                reached.add(nb)
                todo.append(nb)
    return len(reached) == len(fan.max_cones)


def in_support(fan: Fan, point: Sequence) -> bool:
    return any(cone_contains(fan.vectors(c), point) for c in fan.max_cones)


def singular_locus(fan: Fan) -> SingularityReport:
    sing = tuple(c for c in fan.all_cones() if not is_smooth_cone(fan, c))
    if not sing:
        return SingularityReport((), -1)
    return SingularityReport(sing, fan.dim - min(c.dim for c in sing))


# -- refinements and stars ---------------------------------------------------

def star_subdivision(fan: Fan, new_ray: Sequence[int]) -> Fan:
    new_ray = tuple(int(x) for x in new_ray)
    if len(new_ray) != fan.dim:
        raise FanError(f"ray {new_ray} does not live in Z^{fan.dim}")
    if not is_primitive(new_ray):
        raise FanError(f"ray {new_ray} is not primitive")
    if new_ray in fan.rays:
        raise DuplicateRayError(f"{new_ray} is already a ray of the fan")
    if not in_support(fan, new_ray):
        raise RayOutsideSupportError(f"{new_ray} lies outside the support of the fan")
    n = len(fan.rays)
    cones = []
    for c in fan.max_cones:
        coeffs = cone_coefficients(fan.vectors(c), new_ray)
        if coeffs is not None and all(x >= 0 for x in coeffs):
            for i, ci in zip(c.ray_indices, coeffs):
                if ci > 0:
                    cones.append(tuple(j if j != i else n for j in c.ray_indices))
        else:
            cones.append(c.ray_indices)
    out = Fan.build(fan.dim, list(fan.rays) + [new_ray], cones,
                    label=f"{fan.label or 'fan'} + star{new_ray}", warnings=fan.warnings)
    return check_fan(out)


def star_fan_of_ray(fan: Fan, ray: Sequence[int]) -> Fan:
    """Fan in Z^d / Z·ray formed by the images of the cones containing ``ray``."""
    idx = fan.ray_index(ray)
    qp = quotient_presentation(IntMatrix.from_cols([fan.rays[idx]], fan.dim))
    rays: list[Vector] = []
    cones = []
    for c in fan.max_cones:
        if idx not in c:
            continue
        img = []
        for j in c.ray_indices:
            if j == idx:
                continue
            v = primitive(qp.projection.apply(fan.rays[j]))
            if v not in rays:
                rays.append(v)
            img.append(rays.index(v))
        cones.append(tuple(img))
    return Fan.build(fan.dim - 1, rays, cones, label=f"star{tuple(fan.rays[idx])}")


# -- isomorphisms ------------------------------------------------------------

def _ray_bijections(fanX: Fan, fanY: Fan) -> Iterable[tuple[int, ...]]:
    """Ray bijections carrying maximal cones of X onto those of Y, lexicographic."""
    n = len(fanX.rays)
    if n != len(fanY.rays) or len(fanX.max_cones) != len(fanY.max_cones) or fanX.dim != fanY.dim:
        return
    target = {frozenset(c.ray_indices) for c in fanY.max_cones}
    degX = [sum(i in c for c in fanX.max_cones) for i in range(n)]
    degY = [sum(i in c for c in fanY.max_cones) for i in range(n)]
    assign: list[int] = []
    used = [False] * n

    def extend():
        k = len(assign)
        if k == n:
            if {frozenset(assign[i] for i in c.ray_indices) for c in fanX.max_cones} == target:
                yield tuple(assign)
            return
        for j in range(n):
            if not used[j] and degX[k] == degY[j]:
                used[j] = True
                assign.append(j)
                yield from extend()
                assign.pop()
                used[j] = False

    yield from extend()


def _positive_null_vector(rows: list[list[Fraction]], n: int) -> list[Fraction] | None:
    ns = rational.nullspace(rows, n) if rows else [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    if not ns:
        return None
    if len(ns) == 1:
        z = ns[0]
        if all(x > 0 for x in z):
            return z
        if all(x < 0 for x in z):
            return [-x for x in z]
        return None
    # several free scalings: find an interior point by LP, then certify exactly
    from scipy.optimize import linprog
    k = len(ns)
    A_ub = [[-float(ns[b][i]) for b in range(k)] for i in range(n)]
    res = linprog([0.0] * k, A_ub=A_ub, b_ub=[-1.0] * n, bounds=[(None, None)] * k, method="highs")
    if not res.success:
        return None
    t = [Fraction(x).limit_denominator(10 ** 6) for x in res.x]
    lam = [sum(t[b] * ns[b][i] for b in range(k)) for i in range(n)]
    return lam if all(x > 0 for x in lam) else None


def rational_fan_isomorphism(fanX: Fan, fanY: Fan) -> FanIsomorphism | None:
    d = fanX.dim
    if d != fanY.dim:
        return None
    n = len(fanX.rays)
    for pi in _ray_bijections(fanX, fanY):
        base = fanX.max_cones[0].ray_indices
        UB = [[fanX.rays[b][i] for b in base] for i in range(d)]
        UB_inv = rational.inverse(UB)
        rows = []
        for k in range(n):
            if k in base:
                continue
            c = [sum(UB_inv[r][i] * fanX.rays[k][i] for i in range(d)) for r in range(d)]
            vk = fanY.rays[pi[k]]
            for coord in range(d):
                row = [Fraction(0)] * n
                for r, b in enumerate(base):
                    row[b] += c[r] * fanY.rays[pi[b]][coord]
                row[k] -= vk[coord]
                rows.append(row)
        lam = _positive_null_vector(rows, n)
        if lam is None:
            continue
        lam = [x / lam[0] for x in lam]
        VB = [[fanY.rays[pi[b]][i] * lam[b] for b in base] for i in range(d)]
        FQ = rational.matmul(VB, UB_inv)
        den = lcm(*(x.denominator for row in FQ for x in row))
        ints = [[int(x * den) for x in row] for row in FQ]
        g = gcd(*(x for row in ints for x in row))
        ints = [[x // g for x in row] for row in ints]
        return FanIsomorphism(LatticeMap.of(ints), tuple(tuple(r) for r in FQ), pi, tuple(lam))
    return None


def lattice_fan_isomorphism(fanX: Fan, fanY: Fan) -> tuple[IntMatrix, tuple[int, ...]] | None:
    """Unimodular F with F(u_i) = v_{pi(i)} for a cone-compatible bijection pi."""
    d = fanX.dim
    if d != fanY.dim:
        return None
    for pi in _ray_bijections(fanX, fanY):
        base = fanX.max_cones[0].ray_indices
        UB_inv = rational.inverse([[fanX.rays[b][i] for b in base] for i in range(d)])
        VB = [[fanY.rays[pi[b]][i] for b in base] for i in range(d)]
        F = rational.matmul(VB, UB_inv)
        if any(x.denominator != 1 for row in F for x in row):
            continue
        M = IntMatrix.from_rows([[int(x) for x in row] for row in F], d)
        if abs(rational.det(F)) != 1:
            continue
        if all(M.apply(u) == fanY.rays[pi[i]] for i, u in enumerate(fanX.rays)):
            return M, pi
    return None


# -- surfaces ----------------------------------------------------------------

def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _normal_form_ordered(v1: Vector, v2: Vector) -> tuple[int, int]:
    a, b = v1
    _, x, y = _ext_gcd(a, b)
    # A = [[-b, a], [x, y]] is unimodular and sends v1 to e2
    p = -b * v2[0] + a * v2[1]
    q = x * v2[0] + y * v2[1]
    n = abs(p)
    return n, (-q) % n if n > 1 else 0


def cone_normal_form_2d(generators: Sequence[Sequence[int]]) -> tuple[int, int]:
    """(n, k) with the cone lattice-equivalent to <e2, n e1 - k e2>.

    Both generator orders are tried and the smaller k kept, so the answer does
    not depend on how the cone is listed.
    """
    if len(generators) != 2 or any(len(v) != 2 for v in generators):
        raise UnsupportedDimensionError("normal forms are defined for 2-dimensional cones in Z^2")
    v1, v2 = (primitive(v) for v in generators)
    if v1[0] * v2[1] - v1[1] * v2[0] == 0:
        raise FanError("generators are linearly dependent")
    return min(_normal_form_ordered(v1, v2), _normal_form_ordered(v2, v1))


# -- dual semigroups ---------------------------------------------------------

def _integer_kernel(rows: Sequence[Sequence[int]], d: int) -> list[list[int]]:
    if not rows:
        return [[int(i == j) for j in range(d)] for i in range(d)]
    G = IntMatrix.from_rows(rows, d)
    dec = snf(G)
    ker = [list(dec.V.col(j)) for j in range(dec.rank, d)]
    return hnf_rows(ker, d)


def _reduce_mod(v: list[int], basis_hnf: list[list[int]]) -> list[int]:
    v = list(v)
    for h in basis_hnf:
        c = next(i for i, x in enumerate(h) if x)
        q = v[c] // h[c]
        if q:
            v = [a - q * b for a, b in zip(v, h)]
    return v


def dual_semigroup_generators_of(vectors: Sequence[Sequence[int]], d: int) -> list[Vector]:
    """Generating set of σ^∨ ∩ Z^d for the simplicial cone σ spanned by ``vectors``.

    The lineality part σ^⊥ ∩ Z^d contributes ± a Hermite basis.  The pointed
    quotient is embedded in Z^k by pairing with the generators; its Hilbert
    basis is read off the fundamental parallelepiped and lifted back.
    """
    k = len(vectors)
    L = _integer_kernel(vectors, d)
    gens: set[Vector] = set()
    for h in L:
        gens.add(tuple(h))
        gens.add(tuple(-x for x in h))
    if k == 0:
        return sorted(gens)
    G = IntMatrix.from_rows(vectors, d)
    dec = snf(G)
    if dec.rank != k:
        raise FanError("cone generators are linearly dependent")
    diag = dec.diagonal

    def lift(lam: Sequence[int]) -> list[int] | None:
        ul = dec.U.apply(lam)
        if any(ul[i] % diag[i] for i in range(k)):
            return None
        y = [ul[i] // diag[i] for i in range(k)] + [0] * (d - k)
        return _reduce_mod(list(dec.V.apply(y)), L)

    box = []
    for i in range(k):
        c = 1
        while lift([c * int(j == i) for j in range(k)]) is None:
            c += 1
        box.append(c)
    # ray generators c_i e_i plus the nonzero points of the half-open box
    cands = [tuple(c * int(j == i) for j in range(k)) for i, c in enumerate(box)]
    for lam in itertools.product(*(range(c) for c in box)):
        if any(lam) and lift(lam) is not None:
            cands.append(lam)
    # irreducible elements of the pointed semigroup Λ ∩ R^k_{>=0}
    hilbert = [g for g in cands
               if not any(h != g and all(a >= b for a, b in zip(g, h)) for h in cands)]
    for lam in hilbert:
        gens.add(tuple(lift(lam)))
    return sorted(gens)


def dual_semigroup_generators(fan: Fan, cone: Cone) -> list[Vector]:
    if fan.dim > 3:
        raise UnsupportedDimensionError("dual semigroup generators are supported for d <= 3")
    return dual_semigroup_generators_of(fan.vectors(cone), fan.dim)


def in_dual_cone(vectors: Sequence[Sequence[int]], m: Sequence[int]) -> bool:
    return all(sum(a * b for a, b in zip(u, m)) >= 0 for u in vectors)
