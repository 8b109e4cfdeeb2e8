import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from toric_kh.fan import (Cone, DuplicateRayError, Fan, FanValidationError, InvalidWeightsError,
                          NotARayError, RayOutsideSupportError, UnsupportedDimensionError,
                          check_fan, cone_contains, cone_normal_form_2d, dual_semigroup_generators,
                          dual_semigroup_generators_of, in_dual_cone, is_complete, is_smooth_cone,
                          lattice_fan_isomorphism, make_projective_space_fan, make_wps_fan,
                          rational_fan_isomorphism, singular_locus, star_fan_of_ray, star_subdivision,
                          validate_fan)
from toric_kh.lattice import IntMatrix

from conftest import all_fixture_fans, incomplete_fixture_fans, sampled_coverage


@pytest.mark.parametrize("d, n_rays, n_cones", [(1, 2, 2), (2, 3, 3), (3, 4, 4), (4, 5, 5)])
def test_projective_space_shape(d, n_rays, n_cones):
    fan = make_projective_space_fan(d)
    assert len(fan.rays) == n_rays and len(fan.max_cones) == n_cones
    assert validate_fan(fan) is None and is_complete(fan)
    assert singular_locus(fan).smooth


def test_wps_rays_unit_first_weight():
    assert make_wps_fan((1, 1, 2)).rays == ((1, 0), (0, 1), (-1, -2))
    assert make_wps_fan((1, 1, 2, 4)).rays == ((1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -2, -4))


@pytest.mark.parametrize("q", [(2, 3, 5), (2, 3, 4), (3, 5, 7), (2, 3, 5, 7)])
def test_wps_general_weights_relation(q):
    fan = make_wps_fan(q)
    assert is_complete(fan) and validate_fan(fan) is None
    # the weights give a positive relation among the rays up to primitivization
    d = fan.dim
    A = [[fan.rays[i][k] for i in range(d + 1)] for k in range(d)]
    import sympy
    ns = sympy.Matrix(A).nullspace()
    assert len(ns) == 1
    v = ns[0] / ns[0][0]
    assert all(x > 0 for x in v)


@pytest.mark.parametrize("q", [(2, 4, 6), (0, 1, 1), (1, -1, 2), (1,)])
def test_wps_invalid(q):
    with pytest.raises(InvalidWeightsError):
        make_wps_fan(q)


def test_non_well_formed_weights_warn():
    fan = make_wps_fan((1, 2, 2))
    assert fan.warnings
    assert is_complete(fan)


def test_validation_overlap_and_primitivity():
    bad = Fan.build(2, [(1, 0), (1, 1), (0, 1)], [(0, 2), (1, 2)])
    v = validate_fan(bad)
    assert v is not None and v.witnesses
    with pytest.raises(FanValidationError):
        check_fan(bad)
    v2 = validate_fan(Fan.build(2, [(2, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (2, 0)]))
    assert v2 is not None and "primitiv" in v2.kind


def test_smooth_cone_examples():
    f3 = Fan.build(3, [(1, 0, 0), (0, 1, 0), (-1, -2, -4)], [(0, 1)])
    assert is_smooth_cone(f3, Cone((0, 1)))
    assert not is_smooth_cone(f3, Cone((0, 2)))
    f2 = make_wps_fan((1, 1, 2))
    assert not is_smooth_cone(f2, Cone((0, 2)))


@pytest.mark.parametrize("fan", all_fixture_fans(), ids=lambda f: f.label or "fan")
def test_completeness_agrees_with_sampling(fan):
    assert is_complete(fan)
    assert sampled_coverage(fan) == 1000


@pytest.mark.parametrize("fan", incomplete_fixture_fans(), ids=lambda f: f.label)
def test_incompleteness_agrees_with_sampling(fan):
    assert not is_complete(fan)
    assert sampled_coverage(fan) < 1000


def test_singular_locus():
    sl = singular_locus(make_wps_fan((1, 1, 2, 4)))
    assert Cone((0, 3)) in sl.singular_cones and sl.singular_locus_dim == 1
    sl = singular_locus(make_wps_fan((1, 2, 3, 5)))
    assert all(c.dim == 3 for c in sl.singular_cones) and sl.singular_locus_dim == 0
    assert singular_locus(make_projective_space_fan(3)).singular_locus_dim == -1


@pytest.mark.parametrize("fan", all_fixture_fans(), ids=lambda f: f.label or "fan")
def test_faces_of_smooth_cones_are_smooth(fan):
    for c in fan.all_cones():
        if is_smooth_cone(fan, c):
            assert all(is_smooth_cone(fan, f) for f in c.faces())


def test_star_subdivision_p112():
    fan = star_subdivision(make_wps_fan((1, 1, 2)), (0, -1))
    assert len(fan.max_cones) == 4
    assert is_complete(fan) and singular_locus(fan).smooth


def test_star_subdivision_preserves_support():
    quadrant = Fan.build(2, [(1, 0), (0, 1)], [(0, 1)])
    sub = star_subdivision(quadrant, (1, 1))
    rng = random.Random(3)
    for _ in range(1000):
        p = (Fraction(rng.randint(-50, 50), rng.randint(1, 7)), Fraction(rng.randint(-50, 50), rng.randint(1, 7)))
        before = any(cone_contains(quadrant.vectors(c), p) for c in quadrant.max_cones)
        after = any(cone_contains(sub.vectors(c), p) for c in sub.max_cones)
        assert before == after
    full = star_subdivision(make_wps_fan((1, 1, 1, 3)), (0, 0, -1))
    assert sampled_coverage(full) == 1000


def test_star_subdivision_errors():
    p2 = make_projective_space_fan(2)
    with pytest.raises(DuplicateRayError):
        star_subdivision(p2, (1, 0))
    quadrant = Fan.build(2, [(1, 0), (0, 1)], [(0, 1)])
    with pytest.raises(RayOutsideSupportError):
        star_subdivision(quadrant, (-1, 0))


def test_star_fans():
    st1 = star_fan_of_ray(make_projective_space_fan(2), (1, 0))
    assert sorted(st1.rays) == [(-1,), (1,)] and is_complete(st1)
    half = star_fan_of_ray(Fan.build(2, [(1, 0), (0, 1)], [(0, 1)]), (1, 0))
    assert len(half.rays) == 1 and not is_complete(half)
    with pytest.raises(NotARayError):
        star_fan_of_ray(make_projective_space_fan(2), (1, 1))


def _maps_cones_onto(iso, fx, fy):
    F = [[Fraction(x) for x in row] for row in iso.rational_matrix]
    for c in fx.all_cones():
        img = [tuple(sum(F[i][k] * v[k] for k in range(fx.dim)) for i in range(fy.dim)) for v in fx.vectors(c)]
        target = fy.vectors(iso.cone_map(c))
        assert all(cone_contains(target, w) for w in img)
        assert len(target) == len(img)


def test_rational_isomorphism_p112_p2():
    fx, fy = make_wps_fan((1, 1, 2)), make_projective_space_fan(2)
    iso = rational_fan_isomorphism(fx, fy)
    assert iso is not None
    assert iso.matrix.matrix == IntMatrix.from_rows([[2, 0], [0, 1]])
    _maps_cones_onto(iso, fx, fy)


@pytest.mark.parametrize("q", [(1, 2, 3), (2, 3, 5), (1, 1, 2, 4), (1, 2, 3, 5)])
def test_rational_isomorphism_maps_cones(q):
    fx = make_wps_fan(q)
    fy = make_projective_space_fan(fx.dim)
    iso = rational_fan_isomorphism(fx, fy)
    assert iso is not None
    _maps_cones_onto(iso, fx, fy)


def test_rational_isomorphism_identity_and_none():
    p2 = make_projective_space_fan(2)
    iso = rational_fan_isomorphism(p2, p2)
    assert iso.matrix.matrix == IntMatrix.identity(2)
    sub = star_subdivision(make_wps_fan((1, 1, 2)), (0, -1))
    assert rational_fan_isomorphism(p2, sub) is None


def test_lattice_isomorphism():
    assert lattice_fan_isomorphism(make_projective_space_fan(2), make_projective_space_fan(2)) is not None
    assert lattice_fan_isomorphism(make_wps_fan((1, 1, 2)), make_projective_space_fan(2)) is None


@pytest.mark.parametrize("gens, nf", [
    ([(1, 0), (0, 1)], (1, 0)),
    ([(1, 0), (-1, -2)], (2, 1)),
    ([(1, 0), (1, 3)], (3, 2)),
])
def test_normal_form_examples(gens, nf):
    assert cone_normal_form_2d(gens) == nf


def test_normal_form_index3():
    n, k = cone_normal_form_2d([(0, 1), (3, -1)])
    assert n == 3 and k in (1, 2)


def _gl2z(moves):
    # product of elementary moves: shears, a swap, a sign flip
    a, b, c, d = 1, 0, 0, 1
    for kind, k in moves:
        if kind == 0:
            a, b = a + k * c, b + k * d
        elif kind == 1:
            c, d = c + k * a, d + k * b
        elif kind == 2:
            a, b, c, d = c, d, a, b
        else:
            a, b = -a, -b
    return a, b, c, d


unimodular = st.lists(st.tuples(st.integers(0, 3), st.integers(-3, 3)), max_size=6).map(_gl2z)


@given(unimodular, st.sampled_from([[(1, 0), (-1, -2)], [(1, 0), (1, 3)], [(2, 5), (1, 3)], [(1, 0), (2, 5)],
                                    [(0, 1), (3, -1)], [(1, 2), (-3, 1)]]))
def test_normal_form_lattice_invariant(m, gens):
    a, b, c, d = m
    moved = [(a * x + b * y, c * x + d * y) for x, y in gens]
    assert cone_normal_form_2d(moved) == cone_normal_form_2d(gens)
    assert cone_normal_form_2d(list(reversed(gens))) == cone_normal_form_2d(gens)


def test_dual_semigroup_examples():
    assert sorted(dual_semigroup_generators_of([(1, 0), (-1, -2)], 2)) == [(0, -1), (1, -1), (2, -1)]
    assert sorted(dual_semigroup_generators_of([(1, 0), (0, 1)], 2)) == [(0, 1), (1, 0)]
    assert sorted(dual_semigroup_generators_of([(1, 0, 0)], 3)) == \
        sorted([(1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)])
    with pytest.raises(UnsupportedDimensionError):
        dual_semigroup_generators(make_projective_space_fan(4), Cone((0,)))


def _bounded_generation(gens, cone_vectors, d, box=5):
    # every dual-cone point in the box is reachable by adding generators, searching within a larger box
    limit = 4 * box
    reach = {(0,) * d}
    frontier = [(0,) * d]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(a + b for a, b in zip(p, g))
                if q not in reach and all(abs(x) <= limit for x in q):
                    reach.add(q)
                    nxt.append(q)
        frontier = nxt
    for m in itertools.product(range(-box, box + 1), repeat=d):
        if in_dual_cone(cone_vectors, m):
            assert m in reach, m


@pytest.mark.parametrize("vectors", [[(1, 0), (-1, -2)], [(1, 0), (1, 3)], [(2, 5), (1, 3)], [(1, 0)],
                                     [(0, 0, 1), (1, 0, 0), (-1, -2, -4)], [(1, 0, 0), (-1, -2, -4)],
                                     [(1, 0, 0), (0, 1, 0), (-1, -2, -3)]])
def test_dual_semigroup_generates_bounded_points(vectors):
    d = len(vectors[0])
    gens = dual_semigroup_generators_of(vectors, d)
    assert all(in_dual_cone(vectors, g) for g in gens)
    _bounded_generation(gens, vectors, d, box=5 if d == 2 else 3)
