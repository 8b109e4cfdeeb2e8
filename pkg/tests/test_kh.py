from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from toric_kh.fan import make_projective_space_fan, make_wps_fan, star_subdivision
from toric_kh.kh import (NotInjectiveError, build_weight_complex, cohomology_ranks, compare_kh,
                         exterior_power, is_cochain_complex, kh_multiplicities, torus_k_decomposition,
                         verify_isogeny_k_automorphism)
from toric_kh.lattice import LatticeMap
from toric_kh.nerve import NerveMode, build_nerve
from toric_kh import rational

from conftest import WPS_2D, WPS_3D


def test_torus_decomposition():
    assert torus_k_decomposition(0).weights == ((0, 1),)
    assert torus_k_decomposition(1).weights == ((0, 1), (1, 1))
    assert torus_k_decomposition(2).weights == ((0, 1), (1, 2), (2, 1))


def test_exterior_power_examples():
    A = [[1, 2], [3, 4]]
    assert exterior_power(A, 1) == [[1, 2], [3, 4]]
    assert exterior_power([[2, 0], [0, 3]], 2) == [[6]]
    assert exterior_power(A, 2) == [[-2]]
    assert exterior_power(A, 0) == [[1]]


small = st.integers(-4, 4)


@st.composite
def matrix_pair(draw):
    n, k, m = draw(st.integers(1, 4)), draw(st.integers(1, 4)), draw(st.integers(1, 4))
    A = [[Fraction(draw(small), draw(st.integers(1, 3))) for _ in range(k)] for _ in range(n)]
    B = [[Fraction(draw(small), draw(st.integers(1, 3))) for _ in range(m)] for _ in range(k)]
    return A, B, draw(st.integers(0, min(n, k, m)))


@given(matrix_pair())
def test_exterior_power_functorial(pair):
    A, B, s = pair
    AB = rational.matmul(A, B)
    lhs = exterior_power(AB, s, len(A), len(B[0]))
    rhs = rational.matmul(exterior_power(A, s, len(A), len(B)), exterior_power(B, s, len(B), len(B[0])))
    assert lhs == rhs


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_top_exterior_power_is_det(A):
    assert exterior_power(A, 3) == [[sympy.Matrix(A).det()]]


def test_p1_weight_complexes():
    n = build_nerve(make_projective_space_fan(1))
    wc0 = build_weight_complex(n, 0)
    assert wc0.dims() == [2, 1] and cohomology_ranks(wc0) == [1, 0]
    wc1 = build_weight_complex(n, 1)
    assert wc1.dims() == [0, 1] and cohomology_ranks(wc1) == [0, 1]
    wc2 = build_weight_complex(n, 2)
    assert wc2.dims() == [0, 0] and cohomology_ranks(wc2) == [0, 0]


FIXTURES = [make_projective_space_fan(d) for d in (1, 2, 3)] + [make_wps_fan(q) for q in WPS_2D + WPS_3D]


@pytest.mark.parametrize("fan", FIXTURES, ids=lambda f: f.label)
def test_complexes_and_euler_characteristic(fan):
    n = build_nerve(fan)
    for s in range(fan.dim + 2):
        wc = build_weight_complex(n, s)
        assert is_cochain_complex(wc)
        ranks = cohomology_ranks(wc)
        assert all(r >= 0 for r in ranks)
        chi_c = sum((-1) ** p * x for p, x in enumerate(wc.dims()))
        chi_h = sum((-1) ** p * x for p, x in enumerate(ranks))
        assert chi_c == chi_h


@pytest.mark.parametrize("fan", FIXTURES, ids=lambda f: f.label)
def test_multiplicities_concentrated_in_degree_zero(fan):
    mv = kh_multiplicities(fan)
    assert mv == {0: len(fan.max_cones)}
    assert all(r >= 0 for _, _, r in mv.table)


def test_multiplicities_of_subdivided_fan():
    fan = star_subdivision(make_wps_fan((1, 1, 2)), (0, -1))
    assert kh_multiplicities(fan) == {0: 4}


@pytest.mark.parametrize("d", [1, 2])
def test_full_and_alternating_agree(d):
    fan = make_projective_space_fan(d)
    m = len(fan.max_cones)
    alt = build_nerve(fan, NerveMode.ALTERNATING)
    full = build_nerve(fan, NerveMode.FULL, p_max=m)
    for s in range(d + 1):
        wf = build_weight_complex(full, s)
        assert is_cochain_complex(wf)
        assert cohomology_ranks(build_weight_complex(alt, s)) == cohomology_ranks(wf, top=m)


def test_isogeny_automorphism():
    rep = verify_isogeny_k_automorphism(LatticeMap.of([[1, 0], [0, 1]]))
    assert rep.invertible and rep.determinant == 1
    rep = verify_isogeny_k_automorphism(LatticeMap.of([[2, 0], [0, 3]]))
    assert rep.weight_determinants[2] == 6 and rep.diagonal_scalings[2] == [6]
    assert rep.diagonal_scalings[1] == [2, 3]
    with pytest.raises(NotInjectiveError):
        verify_isogeny_k_automorphism(LatticeMap.of([[1, 1], [1, 1]]))


@given(st.lists(st.integers(-5, 5).filter(bool), min_size=1, max_size=4))
def test_diagonal_scaling_is_product(m):
    r = len(m)
    A = [[m[i] if i == j else 0 for j in range(r)] for i in range(r)]
    rep = verify_isogeny_k_automorphism(LatticeMap.of(A))
    from itertools import combinations
    from math import prod
    for s in range(r + 1):
        expected = [prod(m[i] for i in S) for S in combinations(range(r), s)]
        assert rep.diagonal_scalings[s] == expected
        ext = exterior_power(A, s, r, r)
        assert [ext[i][i] for i in range(len(ext))] == expected


def test_compare_self_and_none():
    fan = make_projective_space_fan(2)
    cmp = compare_kh(fan, fan)
    assert cmp.equal and all(row[3] == 1 for row in cmp.degree_table())
    sub = star_subdivision(make_wps_fan((1, 1, 2)), (0, -1))
    assert compare_kh(fan, sub) is None


def test_compare_p112_p2():
    cmp = compare_kh(make_wps_fan((1, 1, 2)), make_projective_space_fan(2))
    assert cmp.equal and cmp.vector == {0: 3}
