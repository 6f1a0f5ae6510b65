import math

import numpy as np
import pytest

from qesquartic.errors import InvalidInput
from qesquartic.model import Contour, ModelSpec, from_bender_boettcher
from qesquartic.oracle import (
    GridConfig,
    convergence_ratio,
    fd_matrix,
    fd_spectrum,
    match_levels,
    nearest,
    potential,
    relative_error,
)
from qesquartic.spectrum import solve_spectrum

CUBE96 = 96 ** (1 / 3)


# -- grid -------------------------------------------------------------------

def test_grid_defaults_and_spacing():
    g = GridConfig()
    assert (g.t_max, g.points, g.epsilon) == (8.0, 2000, 1.0)
    assert GridConfig(1.0, 3).spacing == 1.0
    assert GridConfig(2.0, 5).halved() == GridConfig(2.0, 9)
    assert GridConfig(2.0, 5).halved().spacing == GridConfig(2.0, 5).spacing / 2


@pytest.mark.parametrize("kw", [{"points": 2}, {"t_max": 0.0}, {"t_max": -1.0}])
def test_grid_validation(kw):
    with pytest.raises(InvalidInput):
        GridConfig(**kw)


# -- matching ----------------------------------------------------------------

def test_match_both_present():
    r = match_levels([0.0, CUBE96], [CUBE96 + 1e-6, -3 + 2j, 1e-7 + 1e-8j], 1e-3)
    assert r.passed and not r.unmatched and len(r.matched) == 2
    assert r.max_rel_err < 1e-6


def test_match_missing_level_named():
    r = match_levels([CUBE96], [0.0, 7.0 + 0j], 1e-3)
    assert not r.passed and r.unmatched == [CUBE96]


def test_match_empty_exact_is_vacuous_pass():
    r = match_levels([], [1.0, 2.0], 1e-3)
    assert r.passed and r.matched == [] and r.unmatched == []


def test_match_rejects_large_imaginary_part():
    assert not match_levels([1.0], [1.0 + 0.01j], 1e-3).passed


def test_match_each_numeric_used_once():
    r = match_levels([1.0, 1.0], [1.0 + 0j], 1e-3)
    assert len(r.matched) == 1 and r.unmatched == [1.0]


def test_match_tol_must_be_positive():
    with pytest.raises(InvalidInput):
        match_levels([1.0], [1.0], 0.0)


def test_relative_error_absolute_near_zero():
    assert relative_error(0.0, 1e-4) == pytest.approx(1e-4)
    assert relative_error(100.0, 101.0) == pytest.approx(1e-2)


def test_report_dict_is_plain():
    d = match_levels([1.0], np.array([1.0 + 1e-9j]), 1e-3).to_dict()
    assert d["passed"] is True and isinstance(d["matched"][0]["numeric"][0], float)


# -- discretisation ----------------------------------------------------------

def test_potential_formula():
    spec = ModelSpec(1, 2, 3, 1, 2)
    cp = spec.couplings()
    x = np.array([0.5 - 1j, -2.0 - 1j])
    d = 0.7
    L = 1.0
    want = (L * (L + 1) / x ** 2 + 1j * d / x + 1j * float(spec.c) * x
            + float(cp.b) * x ** 2 + 1j * float(cp.a) * x ** 3 - x ** 4)
    assert np.allclose(potential(spec, x, d), want)


def test_matrix_is_tridiagonal():
    g = GridConfig(2.0, 21)
    H = fd_matrix(ModelSpec(1, 0, 3), Contour.straight(1.0), g)
    h = g.spacing
    assert H.shape == (19, 19)
    assert np.allclose(np.diag(H, 1), -1 / h ** 2)
    assert np.allclose(np.diag(H, -1), -1 / h ** 2)
    assert np.count_nonzero(np.triu(H, 2)) == 0


def test_rejects_bad_inputs():
    spec = ModelSpec(1, 0, 3)
    with pytest.raises(InvalidInput):
        fd_matrix(spec, Contour.straight(-1.0), GridConfig(8.0, 200))
    with pytest.raises(InvalidInput):
        fd_matrix(spec, Contour.wedge(math.pi / 4), GridConfig(8.0, 200))
    with pytest.raises(InvalidInput):
        fd_matrix(spec, Contour.straight(1.0), GridConfig(8.0, 30))
    with pytest.raises(InvalidInput):
        fd_matrix(ModelSpec.symbolic(1, 0, 3), Contour.straight(1.0), GridConfig(8.0, 200))


def test_spectrum_sorted_by_real_part():
    ev = fd_spectrum(ModelSpec(1, 0, 3), Contour.straight(1.0), GridConfig(6.0, 200))
    assert np.all(np.diff(ev.real) >= 0)
    assert nearest(ev, 4.0) == ev[np.argmin(np.abs(ev - 4.0))]


# -- against the quasi-exact levels ----------------------------------------------

@pytest.mark.slow
def test_k0_n3_levels_found():
    spec = ModelSpec(1, 0, 3)
    exact = [float(s.E) for s in solve_spectrum(spec)]
    r = match_levels(exact, fd_spectrum(spec, Contour.straight(1.0)), 1e-3)
    assert r.passed, r.to_dict()
    assert r.max_rel_err < 1e-3


@pytest.mark.slow
def test_sigma_minus_mirror_contour():
    spec = ModelSpec(-1, 0, 3)
    exact = [float(s.E) for s in solve_spectrum(spec)]
    ev = fd_spectrum(spec, Contour.straight(1.0, -1), GridConfig(8.0, 1001))
    assert match_levels(exact, ev, 1e-2).passed


@pytest.mark.slow
def test_bender_boettcher_double_level():
    # (a, c, J) = (0, 0, 2) is K = 0, N = 1 with E^2 = 0: one double level.
    # At an exceptional point the discretisation splits it by O(sqrt(h^2)), so
    # only closeness of the pair is checked here.
    spec = from_bender_boettcher(0, 0, 2)
    states = solve_spectrum(spec)
    assert [float(s.E) for s in states] == [0.0] and states[0].multiplicity == 2
    ev = fd_spectrum(spec, Contour.straight(1.0), GridConfig(8.0, 1001))
    near = sorted(ev, key=abs)[:2]
    assert all(abs(z) < 0.2 for z in near)
    assert abs(sum(near)) / 2 < 1e-2


@pytest.mark.slow
def test_second_order_convergence():
    _, _, ratio = convergence_ratio(ModelSpec(1, 0, 3), Contour.straight(1.0), CUBE96,
                                    GridConfig(8.0, 501))
    assert 3.5 <= ratio <= 4.5
