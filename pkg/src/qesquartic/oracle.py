"""Finite-difference cross-check along a straight complex contour.

The Hamiltonian -d^2/dx^2 + L(L+1)/x^2 + i d/x + i c x + b x^2 + i a x^3 - x^4
is discretised on x(t) = t - i sigma eps, t in [-t_max, t_max], with a
three-point stencil and Dirichlet ends; the dense complex matrix is handed to
LAPACK via scipy.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import InvalidInput
from .model import STRAIGHT, Contour, ModelSpec, check_contour

MAX_SPACING = 0.25


@dataclass(frozen=True)
class GridConfig:
    t_max: float = 8.0
    points: int = 2000
    epsilon: float = 1.0

    def __post_init__(self):
        if self.points < 3:
            raise InvalidInput("grid needs at least 3 points")
        if self.t_max <= 0:
            raise InvalidInput("t_max must be positive")

    @property
    def spacing(self) -> float:
        return 2 * self.t_max / (self.points - 1)

    def halved(self) -> "GridConfig":
        return GridConfig(self.t_max, 2 * self.points - 1, self.epsilon)


def potential(spec: ModelSpec, x: np.ndarray, d: complex = 0.0) -> np.ndarray:
    cp = spec.couplings()
    a, b, c = float(cp.a), float(cp.b), float(spec.c)
    L = float(spec.L)
    return (L * (L + 1) / x ** 2 + 1j * d / x + 1j * c * x + b * x ** 2
            + 1j * a * x ** 3 - x ** 4)


def fd_matrix(spec: ModelSpec, contour: Contour, grid: GridConfig, d: complex = 0.0) -> np.ndarray:
    if spec.is_symbolic:
        raise InvalidInput("the oracle needs numeric S and T")
    if contour.kind != STRAIGHT:
        raise InvalidInput("the oracle discretises straight-line contours only")
    verdict = check_contour(contour, spec.couplings())
    if not verdict.admissible:
        raise InvalidInput(f"inadmissible contour: {verdict.reason}")
    h = grid.spacing
    if h > MAX_SPACING:
        raise InvalidInput(f"grid spacing {h:g} exceeds {MAX_SPACING}")
    t = np.linspace(-grid.t_max, grid.t_max, grid.points)[1:-1]
    x = t - 1j * contour.sigma * contour.epsilon
    n = t.size
    H = np.zeros((n, n), dtype=complex)
    idx = np.arange(n)
    H[idx, idx] = 2.0 / h ** 2 + potential(spec, x, d)
    H[idx[:-1], idx[:-1] + 1] = -1.0 / h ** 2
    H[idx[1:], idx[1:] - 1] = -1.0 / h ** 2
    return H


def fd_spectrum(spec: ModelSpec, contour: Contour, grid: GridConfig = GridConfig(),
                d: complex = 0.0) -> np.ndarray:
    """All eigenvalues of the discretised operator, sorted by real part."""
    ev = scipy.linalg.eigvals(fd_matrix(spec, contour, grid, d), overwrite_a=True,
                              check_finite=False)
    return ev[np.argsort(ev.real, kind="stable")]


@dataclass(frozen=True)
class MatchReport:
    matched: list = field(default_factory=list)    # (exact, numeric, rel_err)
    unmatched: list = field(default_factory=list)  # exact levels without a partner
    max_rel_err: float = 0.0
    passed: bool = True

    def to_dict(self) -> dict:
        return {
            "matched": [{"exact": float(e), "numeric": [float(z.real), float(z.imag)],
                         "rel_err": float(r)} for e, z, r in self.matched],
            "unmatched": [float(e) for e in self.unmatched],
            "max_rel_err": float(self.max_rel_err),
            "passed": self.passed,
        }


def relative_error(exact: float, numeric: complex) -> float:
    """|numeric - exact| / max(1, |exact|); absolute near zero."""
    return abs(numeric - exact) / max(1.0, abs(exact))


def match_levels(exact, numeric, tol: float) -> MatchReport:
    """Greedy nearest matching of real exact levels against numeric eigenvalues."""
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    pool = list(np.asarray(numeric, dtype=complex))
    matched, unmatched = [], []
    worst = 0.0
    for e in sorted(float(x) for x in exact):
        if not pool:
            unmatched.append(e)
            continue
        j = min(range(len(pool)), key=lambda k: abs(pool[k] - e))
        z = pool[j]
        err = relative_error(e, z)
        if err < tol and abs(z.imag) < tol:
            matched.append((e, z, err))
            worst = max(worst, err)
            pool.pop(j)
        else:
            unmatched.append(e)
    return MatchReport(matched, unmatched, worst, not unmatched)


def nearest(ev: np.ndarray, target: float) -> complex:
    return ev[np.argmin(np.abs(ev - target))]


def convergence_ratio(spec: ModelSpec, contour: Contour, level: float,
                      grid: GridConfig, d: complex = 0.0) -> tuple:
    """(err(h), err(h/2), ratio) for one exactly known level."""
    e1 = abs(nearest(fd_spectrum(spec, contour, grid, d), level) - level)
    e2 = abs(nearest(fd_spectrum(spec, contour, grid.halved(), d), level) - level)
    return e1, e2, e1 / e2
