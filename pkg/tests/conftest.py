import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import settings

from toric_kh.fan import Fan, make_projective_space_fan, make_wps_fan

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

WPS_2D = [(1, 1, 1), (1, 1, 2), (1, 1, 3), (1, 2, 3), (2, 3, 5), (1, 3, 5), (2, 3, 4)]
WPS_3D = [(1, 1, 1, 1), (1, 1, 2, 4), (1, 1, 1, 2), (1, 1, 1, 3), (1, 2, 3, 5)]


def p1124():
    return make_wps_fan((1, 1, 2, 4))


def all_fixture_fans():
    fans = [make_projective_space_fan(d) for d in (1, 2, 3)]
    fans += [make_wps_fan(q) for q in WPS_2D + WPS_3D]
    fans.append(Fan.build(2, [(1, 0), (0, 1), (-1, -2), (0, -1)], [(0, 1), (1, 2), (2, 3), (3, 0)], label="F1-ish"))
    return fans


def incomplete_fixture_fans():
    out = []
    for fan in [make_projective_space_fan(2), make_wps_fan((1, 1, 2)), make_projective_space_fan(3)]:
        out.append(Fan.build(fan.dim, fan.rays, [c.ray_indices for c in fan.max_cones[1:]], label="minus one cone"))
    out.append(Fan.build(2, [(1, 0), (0, 1)], [(0, 1)], label="quadrant"))
    return out


def sampled_coverage(fan, n=1000, seed=7):
    """Fraction of n deterministic random points covered by the maximal cones.

    Membership is decided with sympy's exact inverse of each generator matrix,
    independently of the package's own cone code.
    """
    rng = random.Random(seed)
    inverses = [sympy.Matrix([list(v) for v in fan.vectors(c)]).T.inv() for c in fan.max_cones
                if c.dim == fan.dim]
    covered = 0
    for _ in range(n):
        p = sympy.Matrix([Fraction(rng.randint(-997, 997), rng.randint(1, 13)) for _ in range(fan.dim)])
        if any(all(x >= 0 for x in inv * p) for inv in inverses):
            covered += 1
    return covered


@pytest.fixture
def p2():
    return make_projective_space_fan(2)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
