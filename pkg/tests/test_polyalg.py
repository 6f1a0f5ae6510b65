import random
from fractions import Fraction

import pytest
import sympy

from oracles import laplace_det, to_sympy
from qesquartic.errors import InvalidInput
from qesquartic.polyalg import (
    MultiPoly,
    det_fraction_free,
    expand_sparsity,
    isolate_real_roots,
    refine_interval,
    refine_root,
    resultant,
    sparsity_reduce,
    squarefree_part,
    sturm_count,
)

d = MultiPoly.variable("d")
E = MultiPoly.variable("E")
S = MultiPoly.variable("S")
T = MultiPoly.variable("T")
x = MultiPoly.variable("x", ("x",))


def P(text, gens=("d", "E", "S", "T")):
    return MultiPoly.from_text(text, gens)


# -- MultiPoly basics ----------------------------------------------------

def test_zero_coefficients_are_dropped():
    p = (d + 1) * (d - 1) - d * d
    assert p == MultiPoly.constant(-1)
    assert len(d - d) == 0 and (d - d).is_zero()


def test_equality_is_term_map_equality():
    assert (d + E) ** 2 == d * d + 2 * d * E + E * E
    assert hash((d + E) ** 2) == hash(d * d + 2 * d * E + E * E)
    assert d + E != d - E


def test_canonical_text_order():
    p = -(d ** 3) - S * d ** 2 + 2
    assert p.to_text() == "-d^3 - S*d^2 + 2"
    assert str(MultiPoly.constant(0)) == "0"


@pytest.mark.parametrize("text", [
    "-d^3 - S*d^2 + S^2*d + 2*T*d + 2 + S^3 + 2*S*T",
    "E^4 - 96*E",
    "3/2*d*E - 1/3",
    "7",
])
def test_text_round_trip(text):
    p = P(text)
    assert P(p.to_text()) == p


def test_from_text_rejects_unknown_symbol():
    with pytest.raises(InvalidInput):
        P("d + q")


def test_subs_and_evaluate():
    p = d ** 2 - E
    assert p.subs({"E": d ** 2}).is_zero()
    assert p.evaluate({"d": 3, "E": 4}) == 5
    assert p.subs({"d": Fraction(1, 2)}) == MultiPoly.constant(Fraction(1, 4)) - E


def test_exact_div():
    p = (d - S) * (d ** 2 + T)
    assert p.exact_div(d - S) == d ** 2 + T
    with pytest.raises(ArithmeticError):
        (d ** 2 + 1).exact_div(d - 1)


def test_primitive_forces_positive_leading_coefficient():
    p = -6 * d ** 3 + 12
    assert p.primitive() == d ** 3 - 2
    assert p.same_up_to_scale(d ** 3 - 2)


# -- determinants ----------------------------------------------------------

def test_det_one_by_one_constraint_block():
    assert det_fraction_free([[-d]]) == -d


def test_det_identity():
    I3 = [[MultiPoly.constant(int(i == j)) for j in range(3)] for i in range(3)]
    assert det_fraction_free(I3) == MultiPoly.constant(1)


def test_det_k1_constraint_block():
    M = [[-S - d, MultiPoly.constant(-1)], [S * S - E, S - d]]
    assert det_fraction_free(M) == d ** 2 - E


def test_det_empty_matrix_rejected():
    with pytest.raises(InvalidInput):
        det_fraction_free([])


def test_det_needs_pivot_swap():
    M = [[0, 1, 0], [1, 0, 0], [0, 0, d]]
    assert det_fraction_free(M) == -d


@pytest.mark.parametrize("seed", range(40))
def test_det_matches_cofactor_expansion(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    vars_ = [d, E, S, T, MultiPoly.constant(1)]
    M = [[rng.randint(-3, 3) * rng.choice(vars_) + rng.randint(-2, 2) for _ in range(n)]
         for _ in range(n)]
    assert det_fraction_free(M) == laplace_det(M)


# -- resultants ----------------------------------------------------------

def test_resultant_by_substitution():
    assert resultant(E - d ** 2, E ** 2 - 5, "E").primitive() == d ** 4 - 5


def test_resultant_of_coprime_constants():
    assert resultant(d - 1, d + 1, "d").constant_value() in (2, -2)


def test_resultant_requires_positive_degree():
    with pytest.raises(InvalidInput):
        resultant(d + 1, E, "E")


@pytest.mark.parametrize("seed", range(10))
def test_resultant_agrees_with_sympy(seed):
    rng = random.Random(100 + seed)

    def rand_poly():
        p = MultiPoly.constant(rng.randint(-3, 3))
        for _ in range(rng.randint(2, 4)):
            p = p + rng.randint(-4, 4) * d ** rng.randint(0, 2) * E ** rng.randint(0, 3)
        return p + E ** rng.randint(1, 3)

    p, q = rand_poly(), rand_poly()
    ours = to_sympy(resultant(p, q, "E"))
    ref = sympy.resultant(to_sympy(p), to_sympy(q), sympy.Symbol("E"))
    assert sympy.expand(ours - ref) == 0 or sympy.expand(ours + ref) == 0


@pytest.mark.parametrize("seed", range(10))
def test_resultant_vanishes_exactly_at_shared_roots(seed):
    rng = random.Random(seed)
    r = rng.randint(-5, 5)
    a, b = rng.randint(-5, 5), rng.randint(-5, 5)
    # both share E = r when d = a
    p = (E - r) * (E - d - b)
    q = (E - r - (d - a)) * (E + 3)
    R = resultant(p, q, "E")
    assert R.evaluate({"d": a}) == 0
    probe = a + 7
    shared = {r, probe + b} & {r + probe - a, -3}
    assert (R.evaluate({"d": probe}) == 0) == bool(shared)


# -- square-free parts and roots ---------------------------------------------

def test_squarefree_collapses_double_zero():
    assert squarefree_part(d ** 5 - 6 * d ** 2) == d ** 4 - 6 * d


def test_squarefree_keeps_squarefree_input():
    assert squarefree_part(d ** 3 - 2) == d ** 3 - 2
    assert squarefree_part((d - 1) ** 2) == d - 1


def test_squarefree_zero_rejected():
    with pytest.raises(InvalidInput):
        squarefree_part(MultiPoly.constant(0))


def test_isolate_energy_quartic():
    iso = isolate_real_roots(E ** 4 - 96 * E)
    roots = [refine_root(iso, i, Fraction(1, 10 ** 12)) for i in range(len(iso))]
    assert roots[0] == 0
    assert abs(float(roots[1]) - 96 ** (1 / 3)) < 1e-11


def test_isolate_k2_quartic():
    q = P("x^4 - 96*x^3 + 384*x^2 + 18432*x + 331776", ("x",))
    iso = isolate_real_roots(q)
    assert len(iso) == 2
    assert refine_root(iso, 0, Fraction(1, 10 ** 8)) == 24
    assert abs(float(refine_root(iso, 1, Fraction(1, 10 ** 9))) - 88.87294116) < 1e-8


def test_isolate_no_real_roots():
    assert len(isolate_real_roots(d ** 2 + 1)) == 0


def test_isolate_rejects_free_parameters():
    with pytest.raises(InvalidInput):
        isolate_real_roots(d ** 2 - S)


def test_refine_cube_root_of_two():
    iso = isolate_real_roots(d ** 3 - 2)
    r = refine_root(iso, 0, Fraction(1, 10 ** 9))
    assert abs(float(r) - 1.259921050) < 1e-9
    assert r ** 3 != 2


def test_refine_rational_root_exact():
    iso = isolate_real_roots(d - 3)
    assert refine_root(iso, 0, Fraction(1, 10 ** 9)) == 3


def test_refine_index_out_of_range():
    iso = isolate_real_roots(d ** 3 - 2)
    with pytest.raises(IndexError):
        refine_root(iso, 1, Fraction(1, 100))


def test_multiplicities_reported():
    iso = isolate_real_roots(d ** 2 * (d - 1) ** 3 * (d + 2))
    assert list(iso.multiplicities) == [1, 2, 3]


def test_intervals_disjoint_and_bracketing():
    p = (d ** 2 - 2) * (d - Fraction(1, 3)) * (d ** 2 - 7)
    iso = isolate_real_roots(p)
    assert len(iso) == sturm_count(p) == 5
    prev_hi = None
    for i in range(len(iso)):
        lo, hi = refine_interval(iso, i, Fraction(1, 10 ** 6))
        assert hi - lo <= Fraction(1, 10 ** 6)
        if prev_hi is not None:
            assert lo > prev_hi
        prev_hi = hi
        if lo != hi:
            assert p.evaluate({"d": lo}) * p.evaluate({"d": hi}) < 0


# -- sparsity ---------------------------------------------------------------

def test_sparsity_energy_quartic():
    q, gap, shift = sparsity_reduce(E ** 4 - 96 * E, new_var="u")
    assert (gap, shift) == (3, 1)
    assert q == P("u - 96", ("u",))


def test_sparsity_k1_n4():
    q, gap, shift = sparsity_reduce(P("d^9 - 20*d^6 - 76*d^3 + 512"), new_var="u")
    assert (gap, shift) == (3, 0)
    assert q == P("u^3 - 20*u^2 - 76*u + 512", ("u",))


def test_sparsity_trivial():
    q, gap, shift = sparsity_reduce(d ** 2 + d + 1, new_var="u")
    assert (gap, shift) == (1, 0)
    assert q == P("u^2 + u + 1", ("u",))


def test_sparsity_zero_rejected():
    with pytest.raises(InvalidInput):
        sparsity_reduce(MultiPoly.constant(0, ("d",)), "d")


@pytest.mark.parametrize("seed", range(20))
def test_sparsity_round_trip(seed):
    rng = random.Random(seed)
    gap = rng.randint(1, 4)
    shift = rng.randint(0, 3)
    p = MultiPoly.constant(0)
    for k in range(rng.randint(1, 4)):
        p = p + rng.choice([-3, -1, 1, 2, 5]) * d ** (shift + gap * k)
    q, g, s = sparsity_reduce(p, "d", "u")
    assert expand_sparsity(q, g, s, "d") == p
