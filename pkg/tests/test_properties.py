from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from oracles import laplace_det
from qesquartic.model import (
    ModelSpec,
    from_bender_boettcher,
    internal_from_physical,
    linear_coupling,
    physical_from_internal,
)
from qesquartic.oracle import match_levels
from qesquartic.polyalg import (
    MultiPoly,
    det_fraction_free,
    expand_sparsity,
    isolate_real_roots,
    refine_interval,
    resultant,
    sparsity_reduce,
)
from qesquartic.secular import eliminate
from qesquartic.spectrum import RESIDUAL_TOL, solve_spectrum

d = MultiPoly.variable("d")
E = MultiPoly.variable("E")
S = MultiPoly.variable("S")
T = MultiPoly.variable("T")

SETTINGS = settings(max_examples=40, deadline=None,
                    suppress_health_check=[HealthCheck.too_slow])

small = st.integers(-4, 4)
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)
monomial = st.tuples(small, st.sampled_from([d, E, S, T]), st.integers(0, 3))


@st.composite
def polys(draw):
    p = MultiPoly.constant(draw(small))
    for c, v, k in draw(st.lists(monomial, max_size=4)):
        p = p + c * v ** k
    return p


@SETTINGS
@given(polys(), polys(), polys())
def test_ring_laws(p, q, r):
    assert (p + q) * r == p * r + q * r
    assert p * q == q * p
    assert (p - p).is_zero()


@SETTINGS
@given(polys())
def test_text_round_trip(p):
    assert MultiPoly.from_text(p.to_text(), ("d", "E", "S", "T")) == p


@SETTINGS
@given(st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_matches_laplace(M):
    assert det_fraction_free(M) == MultiPoly.constant(laplace_det(M))


@SETTINGS
@given(small, small, small)
def test_resultant_vanishes_at_common_root(r, a, b):
    # E - r and (E - r)(E - a d - b) share E = r for every d
    p = E - r
    q = (E - r) * (E - a * d - b)
    assert resultant(p, q, "E").is_zero()


@SETTINGS
@given(st.integers(1, 4), st.integers(0, 3), st.lists(st.sampled_from([-3, -1, 1, 2]), min_size=1, max_size=4))
def test_sparsity_round_trip(gap, shift, coeffs):
    p = MultiPoly.constant(0)
    for k, c in enumerate(coeffs):
        p = p + c * d ** (shift + gap * k)
    q, g, s = sparsity_reduce(p, "d", "u")
    assert expand_sparsity(q, g, s, "d") == p


@SETTINGS
@given(st.lists(rationals, min_size=1, max_size=4, unique=True))
def test_isolation_brackets_known_roots(roots):
    p = MultiPoly.constant(1)
    for r in roots:
        p = p * (d - r)
    iso = isolate_real_roots(p)
    assert len(iso) == len(roots)
    for i, r in enumerate(sorted(roots)):
        lo, hi = refine_interval(iso, i, Fraction(1, 10 ** 6))
        assert lo <= r <= hi


@SETTINGS
@given(rationals, rationals, st.sampled_from([1, -1]))
def test_physical_round_trip(a, b, sigma):
    T_, S_ = internal_from_physical(a, b, sigma)
    back = physical_from_internal(S_, T_, sigma)
    assert (back.a, back.b) == (a, b)


@SETTINGS
@given(rationals, rationals, st.integers(1, 6))
def test_bender_boettcher_linear_coupling(a, c, J):
    assert linear_coupling(from_bender_boettcher(a, c, J)) == a ** 3 - a * c - 2 * J


@SETTINGS
@given(st.integers(0, 2).flatmap(lambda K: st.tuples(st.just(K), st.integers(K, 3))),
       rationals, rationals)
def test_sigma_flip_negates_charges(KN, S_, T_):
    K, N = KN
    plus = eliminate(ModelSpec(1, K, N, S_, T_)).reduced
    minus = eliminate(ModelSpec(-1, K, N, -S_, T_)).reduced
    var = "E" if K == 0 else "d"
    if K == 0:
        assert plus.primitive() == minus.primitive()
    else:
        assert plus.subs({var: -d}).primitive() == minus.primitive()


@SETTINGS
@given(st.integers(0, 1).flatmap(lambda K: st.tuples(st.just(K), st.integers(K, 2))),
       st.sampled_from([1, -1]), rationals, rationals)
def test_every_state_has_a_null_vector(KN, sigma, S_, T_):
    K, N = KN
    spec = ModelSpec(sigma, K, N, S_, T_)
    for s in solve_spectrum(spec):
        assert s.nullspace_residual <= RESIDUAL_TOL and s.rank == N


@SETTINGS
@given(st.lists(st.floats(-50, 50), max_size=5),
       st.lists(st.complex_numbers(max_magnitude=50, allow_nan=False), max_size=5))
def test_match_accepts_exact_subset(levels, extra):
    r = match_levels(levels, list(levels) + extra, 1e-6)
    assert r.passed and len(r.matched) == len(levels)
