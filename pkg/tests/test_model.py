import math
import random
from fractions import Fraction

import pytest

from oracles import recurrence_matrix
from qesquartic.errors import InvalidInput
from qesquartic.model import (
    Contour,
    ModelSpec,
    PhysicalCouplings,
    asymptotic_arg,
    build_system,
    check_contour,
    contour_point,
    from_bender_boettcher,
    internal_from_physical,
    interpret_K,
    linear_coupling,
    on_branch_cut,
    physical_from_internal,
    recurrence_coeffs,
    sector_index,
)
from qesquartic.polyalg import MultiPoly

d = MultiPoly.variable("d")
E = MultiPoly.variable("E")
S = MultiPoly.variable("S")
T = MultiPoly.variable("T")


def const(v):
    return MultiPoly.constant(v)


# -- spec and couplings -------------------------------------------------------

def test_spec_validation():
    with pytest.raises(InvalidInput):
        ModelSpec(2, 0, 0)
    with pytest.raises(InvalidInput):
        ModelSpec(1, -1, 0)
    with pytest.raises(InvalidInput):
        ModelSpec(1, 0, -3)
    with pytest.raises(InvalidInput):
        ModelSpec(1, 0, 0, None, 1)


def test_spec_parses_rationals():
    spec = ModelSpec(1, 1, 1, "3/2", "-0.25")
    assert spec.S == Fraction(3, 2) and spec.T == Fraction(-1, 4)
    assert spec.L == Fraction(1, 2)


def test_config_round_trip():
    for spec in (ModelSpec(-1, 2, 3, Fraction(5, 7), -2), ModelSpec.symbolic(1, 1, 2)):
        cfg = spec.to_config()
        assert ModelSpec.from_config(cfg) == spec
    assert ModelSpec(1, 0, 0, Fraction(1, 3), 0).to_config()["S"] == "1/3"


def test_config_rejects_garbage():
    with pytest.raises(InvalidInput):
        ModelSpec.from_config({"sigma": "x", "K": 0, "N": 0})
    with pytest.raises(InvalidInput):
        ModelSpec.from_config({"sigma": 1, "K": 0, "N": 0, "S": "1/0"})


@pytest.mark.parametrize("a,b,sigma,expected", [
    (2, 1, 1, (1, 0)),
    (0, 0, -1, (0, 0)),
    (2, 5, 1, (1, 2)),
])
def test_internal_from_physical(a, b, sigma, expected):
    assert internal_from_physical(a, b, sigma) == tuple(Fraction(v) for v in expected)


def test_physical_round_trip_random():
    rng = random.Random(3)
    for _ in range(200):
        a = Fraction(rng.randint(-40, 40), rng.randint(1, 9))
        b = Fraction(rng.randint(-40, 40), rng.randint(1, 9))
        sigma = rng.choice((1, -1))
        T_, S_ = internal_from_physical(a, b, sigma)
        back = physical_from_internal(S_, T_, sigma)
        assert (back.a, back.b) == (a, b)


def test_linear_coupling_examples():
    assert linear_coupling(ModelSpec(1, 0, 0)) == -2
    assert linear_coupling(ModelSpec(-1, 1, 3)) == 7
    assert linear_coupling(ModelSpec(1, 2, 3, 2, 3)) == -12 - 6


def test_linear_coupling_symbolic():
    c = linear_coupling(ModelSpec.symbolic(1, 1, 2))
    assert c == -2 * S * T - 5


@pytest.mark.parametrize("a,c,J,S_,T_,N", [
    (0, 0, 1, 0, 0, 0),
    (1, 1, 2, 0, 1, 1),
    (0, 6, 3, 3, 0, 2),
])
def test_bender_boettcher_examples(a, c, J, S_, T_, N):
    spec = from_bender_boettcher(a, c, J)
    assert (spec.sigma, spec.K, spec.N, spec.S, spec.T) == (1, 0, N, S_, T_)
    assert linear_coupling(spec) == a ** 3 - a * c - 2 * J


def test_bender_boettcher_rejects_bad_J():
    with pytest.raises(InvalidInput):
        from_bender_boettcher(1, 1, 0)


# -- recurrence and banded system ---------------------------------------------

@pytest.mark.parametrize("K", range(9))
def test_A_vanishes_at_K(K):
    for N in (K, K + 3):
        for sigma in (1, -1):
            assert recurrence_coeffs(K, ModelSpec(sigma, K, N, 2, -1))[0].is_zero()


def test_recurrence_examples():
    A, B, C, D = recurrence_coeffs(0, ModelSpec(1, 2, 3))
    assert A == const(-2) and B == -d and C == -E
    spec = ModelSpec(-1, 1, 4, 3, 5)
    assert recurrence_coeffs(5, spec)[3] == const(2)
    assert recurrence_coeffs(5, ModelSpec(1, 1, 4))[3] == const(-2)


def test_recurrence_symbolic():
    A, B, C, D = recurrence_coeffs(2, ModelSpec.symbolic(1, 1, 3))
    assert A == const(3) and B == 3 * S - d and C == S * S + 2 * T - E and D == const(-6)


def test_recurrence_row_range():
    with pytest.raises(InvalidInput):
        recurrence_coeffs(4, ModelSpec(1, 0, 2))
    with pytest.raises(InvalidInput):
        recurrence_coeffs(-1, ModelSpec(1, 0, 2))


def test_system_k1_n1():
    spec = ModelSpec.symbolic(1, 1, 1)
    M = build_system(spec).dense()
    assert build_system(spec).shape == (3, 2)
    assert M[0] == [-S - d, const(-1)]
    assert M[1] == [S * S - E, S - d]
    assert M[2] == [const(-2), S * S + 2 * T - E]


def test_system_k0_n0():
    M = build_system(ModelSpec.symbolic(1, 0, 0)).dense()
    assert M == [[-d], [S * S + T - E]]


@pytest.mark.parametrize("K,N", [(0, 0), (1, 2), (2, 3), (3, 5), (4, 4), (2, 7)])
def test_system_matches_independent_layout(K, N):
    spec = ModelSpec(-1, K, N, Fraction(2, 3), -3)
    dv, Ev = Fraction(5, 4), Fraction(-7, 2)
    ours = build_system(spec).numeric(dv, Ev)
    ref = recurrence_matrix(-1, K, N, Fraction(2, 3), Fraction(-3), dv, Ev)
    assert ours == ref
    if K + 1 <= N:
        assert build_system(spec).entry(K, K + 1).is_zero()


def test_system_off_band_zero():
    sysm = build_system(ModelSpec(1, 2, 6, 1, 1))
    for r in range(8):
        for c in range(7):
            if c - r not in (1, 0, -1, -2):
                assert sysm.entry(r, c).is_zero()


# -- contours -------------------------------------------------------------

def test_straight_line_admissibility():
    assert check_contour(Contour.straight(1.0), PhysicalCouplings(1, 0, 0)).admissible
    assert not check_contour(Contour.straight(0.4), PhysicalCouplings(1, 0, 0)).admissible
    assert not check_contour(Contour.straight(-1.0)).admissible


def test_wedge_admissibility():
    assert not check_contour(Contour.wedge(math.pi / 3)).admissible
    assert not check_contour(Contour.wedge(0.0)).admissible
    assert check_contour(Contour.wedge(math.pi / 4)).admissible


def test_verdict_sectors():
    assert check_contour(Contour.straight(1.0, 1)).sectors == (4, 6)
    assert check_contour(Contour.straight(1.0, -1)).sectors == (1, 3)


def test_contour_points():
    assert contour_point(Contour.straight(1.0, 1), 0) == -1j
    assert contour_point(Contour.straight(1.0, -1), 2) == 2 + 1j
    with pytest.raises(InvalidInput):
        contour_point(Contour.wedge(math.pi / 2), 1.0)
    with pytest.raises(InvalidInput):
        contour_point(Contour.straight(0.0), 1.0)


def test_wedge_asymptotic_angle():
    c = Contour.wedge(math.pi / 6, 1)
    assert abs(asymptotic_arg(c, 1e6) + math.pi / 6) < 1e-6
    assert abs(asymptotic_arg(Contour.wedge(math.pi / 6, -1), 1e6) - math.pi / 6) < 1e-6


@pytest.mark.parametrize("sigma", [1, -1])
def test_wedge_symmetry_and_origin(sigma):
    c = Contour.wedge(0.7, sigma, 0.5)
    for t in (0.0, 0.3, 2.0, 40.0):
        x = contour_point(c, t)
        assert abs(contour_point(c, -t) - (-x.conjugate())) < 1e-12
        assert abs(x) > 0.1


@pytest.mark.parametrize("sigma", [1, -1])
def test_tails_lie_in_stated_sectors(sigma):
    wanted = set(check_contour(Contour.straight(1.0, sigma)).sectors)
    for c in (Contour.straight(1.0, sigma), Contour.wedge(0.5, sigma)):
        tails = {sector_index(contour_point(c, t)) for t in (-1e4, 1e4)}
        assert tails == wanted


def test_branch_cut():
    assert on_branch_cut(2j, 1) and not on_branch_cut(-2j, 1)
    assert on_branch_cut(-2j, -1) and not on_branch_cut(1 + 2j, -1)


# -- partial waves ------------------------------------------------------------

def test_interpret_K_examples():
    assert interpret_K(0) == [(0, 3), (1, 1)]
    assert interpret_K(3) == [(0, 6), (1, 4), (2, 2)]
    assert interpret_K(2) == [(0, 5), (1, 3)]


@pytest.mark.parametrize("K", range(12))
def test_interpret_K_complete(K):
    brute = [(l, D) for l in range(30) for D in range(1, 40)
             if 2 * l + D - 3 == K and not (D == 1 and l > 1)]
    assert interpret_K(K) == brute
