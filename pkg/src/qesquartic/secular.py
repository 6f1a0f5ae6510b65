"""The two coupled determinant conditions and their elimination to one variable."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import DegenerateSpec, InvalidInput, UnsupportedError
from .model import ModelSpec, build_system
from .polyalg import MultiPoly, det_fraction_free, resultant, squarefree_part

_d = MultiPoly.variable("d")
_E = MultiPoly.variable("E")
_S = MultiPoly.variable("S")


@dataclass(frozen=True)
class SecularPair:
    """Charge constraint P_K(d, E), secular determinant Q(d, E) and the eliminant.

    ``resultant`` is Res_E(P, Q) made primitive. ``reduced`` drops the
    always-present factor (d - S) at K = 1 (the exceptional root) and is the
    form comparable with the closed displays; ``eliminated`` is its square-free
    part (numeric mode) and is what gets root-isolated.
    """

    spec: ModelSpec
    constraint: MultiPoly
    secular: MultiPoly
    resultant: MultiPoly
    reduced: MultiPoly
    eliminated: MultiPoly
    elimination_var: str
    exceptional_factor: MultiPoly | None = None


def constraint_poly(spec: ModelSpec) -> MultiPoly:
    """det of rows 0..K, columns 0..K; the block is closed because A_K = 0."""
    K = spec.K
    if K > spec.N:
        raise InvalidInput(f"constraint block needs K <= N (K={K}, N={spec.N})")
    sysm = build_system(spec)
    return det_fraction_free(sysm.block(range(K + 1), range(K + 1)))


def secular_poly(spec: ModelSpec) -> MultiPoly:
    """det of rows 1..N+1, columns 0..N (the recurrence system minus its first row)."""
    sysm = build_system(spec)
    return det_fraction_free(sysm.block(range(1, spec.N + 2), range(spec.N + 1)))


def _remove_exceptional(R: MultiPoly, spec: ModelSpec) -> tuple:
    """Divide (d - S) out once at K = 1; it always divides Q(d, d^2)."""
    if spec.K != 1:
        return R, None
    factor = _d - (_S if spec.is_symbolic else spec.S)
    try:
        return R.exact_div(factor), factor
    except ArithmeticError:
        return R, None


def eliminate(spec: ModelSpec) -> SecularPair:
    P = constraint_poly(spec)
    Q = secular_poly(spec)
    if spec.K == 0:
        R = Q.subs({"d": 0})
        var = "E"
    else:
        if P.degree("E") < 1:
            raise DegenerateSpec(f"constraint {P} carries no energy dependence")
        if Q.degree("E") < 1:
            raise DegenerateSpec(f"secular determinant {Q} carries no energy dependence")
        R = resultant(P, Q, "E")
        var = "d"
    if R.is_zero():
        raise DegenerateSpec(f"identically vanishing eliminant for {spec}")
    R = R.primitive()
    reduced, factor = _remove_exceptional(R, spec)
    reduced = reduced.primitive()
    if spec.is_symbolic or reduced.is_constant():
        eliminated = reduced
    else:
        eliminated = squarefree_part(reduced)
    return SecularPair(spec, P, Q, R, reduced, eliminated, var, factor)


def closed_form_quadratic(spec: ModelSpec) -> MultiPoly:
    """K = 3 charge constraint 9E^2 - 10d^2E + d^4 + 48dST + 48 sigma N d
    - 24 sigma d - 72 sigma S - 36T^2, as a polynomial in (d, E)."""
    s = spec.sigma
    S = _S if spec.is_symbolic else spec.S
    T = MultiPoly.variable("T") if spec.is_symbolic else spec.T
    return (9 * _E ** 2 - 10 * _d ** 2 * _E + _d ** 4 + 48 * _d * S * T
            + 48 * s * spec.N * _d - 24 * s * _d - 72 * s * S - 36 * T * T)


def energy_closed_form(K: int, d, spec: ModelSpec) -> list:
    """Energy branches E_K(d) for K <= 3.

    ``d`` may be a number or the indeterminate ``"d"`` (returns polynomials /
    rational expressions only where they are polynomial; K = 2 and K = 3 need a
    numeric d).
    """
    if K != spec.K:
        raise InvalidInput(f"K={K} disagrees with spec.K={spec.K}")
    if K == 0:
        return []
    if K == 1:
        return [_d ** 2] if isinstance(d, str) else [d * d]
    if K >= 4:
        raise UnsupportedError("no closed energy formula beyond K = 3; use constraint_poly")
    if isinstance(d, str):
        raise UnsupportedError("K = 2, 3 branches need a numeric charge")
    if spec.is_symbolic:
        raise UnsupportedError("K = 2, 3 branches need numeric S, T")
    S, T, s, N = spec.S, spec.T, spec.sigma, spec.N
    if K == 2:
        if d == 0:
            raise ZeroDivisionError("E_2(d) has a pole at d = 0; use the cleared constraint")
        return [d * d / 4 + 2 * _like(S * T + s * N, d) / d]
    # K == 3: the two roots F of 9F^2 - 10 d^2 F + const
    disc = k3_discriminant(d, spec)
    b = -10 * d * d
    if isinstance(d, (int, Fraction)):
        d = mpmath.mpf(Fraction(d).numerator) / Fraction(d).denominator
        b = -10 * d * d
        disc = mpmath.mpf(disc.numerator) / disc.denominator
    root = mpmath.sqrt(disc)
    return [(-b - root) / 18, (-b + root) / 18]


def _like(q: Fraction, d):
    """q converted to the numeric type of d (exact stays exact)."""
    if isinstance(d, (int, Fraction)):
        return Fraction(q)
    if isinstance(d, mpmath.mpf):
        return mpmath.mpf(q.numerator) / q.denominator
    return float(q)


def k3_discriminant(d, spec: ModelSpec):
    """Discriminant of the K = 3 energy quadratic at charge d."""
    if isinstance(d, (int, Fraction)):
        d = Fraction(d)
        S, T = spec.S, spec.T
    else:
        S, T = _like(spec.S, d), _like(spec.T, d)
    s, N = spec.sigma, spec.N
    const = d ** 4 + 48 * d * S * T + 48 * s * N * d - 24 * s * d - 72 * s * S - 36 * T * T
    return (10 * d * d) ** 2 - 36 * const


def substitution_route(spec: ModelSpec) -> MultiPoly:
    """Eliminant obtained by inserting the closed energy branch into Q (K = 1, 2)."""
    Q = secular_poly(spec)
    if spec.K == 1:
        R = Q.subs({"E": _d ** 2})
    elif spec.K == 2:
        # E = (d^3 + 8(ST + sigma N)) / (4d); clear the (4d)^deg denominator
        S = _S if spec.is_symbolic else spec.S
        T = MultiPoly.variable("T") if spec.is_symbolic else spec.T
        num = _d ** 3 + 8 * (S * T + spec.sigma * spec.N)
        den = 4 * _d
        coeffs = Q.coeffs_in("E")
        m = len(coeffs) - 1
        R = MultiPoly.constant(0)
        for k, ck in enumerate(coeffs):
            R = R + ck * num ** k * den ** (m - k)
    else:
        raise UnsupportedError("substitution route exists for K = 1 and K = 2 only")
    R = R.primitive()
    return _remove_exceptional(R, spec)[0].primitive()
