"""Quasi-exact states: charge/energy pairing, coefficient vectors and checks."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import DomainError, InvalidInput, UnsupportedError
from .model import Contour, ModelSpec, _curve, build_system, on_branch_cut
from .polyalg import MultiPoly, isolate_real_roots, refine_interval
from .secular import eliminate

WORK_DPS = 50
WORK_WIDTH = Fraction(1, 10 ** 45)
RESIDUAL_TOL = 1e-10
PAIRING_TOL = 1e-9

CHARGE_ZERO = "charge_zero"
EXCEPTIONAL = "exceptional"


def _mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


@dataclass(frozen=True)
class AlgebraicValue:
    """A real root of ``defining_poly`` pinned down by ``interval``.

    ``exact`` is set when the root is rational; ``approx`` is a
    high-precision midpoint either way.
    """

    defining_poly: MultiPoly
    interval: tuple
    approx: mpmath.mpf
    exact: Fraction | None = None

    @classmethod
    def rational(cls, q, var: str = "d") -> "AlgebraicValue":
        q = Fraction(q)
        poly = MultiPoly.from_univariate([-q.numerator, q.denominator], var,
                                         ("d", "E", "S", "T"))
        return cls(poly, (q, q), _mpf(q), q)

    @property
    def value(self):
        return self.exact if self.exact is not None else self.approx

    def __float__(self) -> float:
        return float(self.approx)


@dataclass(frozen=True)
class QuasiExactState:
    d: AlgebraicValue
    E: object  # Fraction when exact, mpmath.mpf otherwise
    h: tuple
    flags: frozenset = frozenset()
    multiplicity: int = 1
    nullspace_residual: float = 0.0
    symbolic_residual_zero: bool | None = None
    rank: int | None = None
    valid: bool = True

    @property
    def is_exact(self) -> bool:
        return self.d.exact is not None and _is_exact(self.E) and all(_is_exact(x) for x in self.h)

    def sort_key(self) -> tuple:
        return (float(self.d.approx), float(self.E))


# ---------------------------------------------------------------------------
# Null vector of the (N+2) x (N+1) system
# ---------------------------------------------------------------------------

def _row_values(spec: ModelSpec, d, E) -> list:
    vals = {"d": d, "E": E}
    out = []
    for A, B, C, D in build_system(spec).rows:
        out.append(tuple(p.evaluate(vals) if p else 0 for p in (A, B, C, D)))
    return out


def _dense_rows(spec: ModelSpec, rows: list) -> list:
    N = spec.N
    dense = []
    for n, (A, B, C, D) in enumerate(rows):
        row = [0] * (N + 1)
        for col, v in ((n + 1, A), (n, B), (n - 1, C), (n - 2, D)):
            if 0 <= col <= N:
                row[col] = v
        dense.append(row)
    return dense


def _propagate(spec: ModelSpec, rows: list, free: int, zero, one) -> list:
    """Seed h_free = 1 (other free slots 0) and run the recurrence forward."""
    N, K = spec.N, spec.K
    h = [zero] * (N + 1)
    h[free] = one
    for n in range(N):
        if n == K:
            continue
        A, B, C, D = rows[n]
        acc = B * h[n]
        if n >= 1:
            acc += C * h[n - 1]
        if n >= 2:
            acc += D * h[n - 2]
        if n + 1 != free:
            h[n + 1] = -acc / A
    return h


def _check_rows(spec: ModelSpec) -> list:
    N, K = spec.N, spec.K
    return sorted({r for r in (K, N, N + 1) if r <= N + 1})


def _dot(row, h):
    total = 0
    for a, b in zip(row, h):
        if a:
            total += a * b
    return total


def _residual(dense: list, h: list) -> float:
    hn = mpmath.sqrt(sum(abs(_mpf(x) if _is_exact(x) else x) ** 2 for x in h))
    worst = mpmath.mpf(0)
    for row in dense:
        rn = mpmath.sqrt(sum(abs(_mpf(x) if _is_exact(x) else x) ** 2 for x in row))
        if rn == 0:
            continue
        v = _dot(row, h)
        v = abs(_mpf(v) if _is_exact(v) else v)
        worst = max(worst, v / (rn * hn))
    return float(worst)


def _normalize(h: list) -> list:
    if all(_is_exact(x) for x in h):
        pivot = next((x for x in h if x != 0), None)
        return [Fraction(x) / pivot for x in h] if pivot is not None else h
    scale = max(abs(x) for x in h)
    pivot = next((x for x in h if abs(x) > scale * mpmath.mpf(10) ** (-30)), None)
    return [x / pivot for x in h] if pivot is not None else h


def _exact_null(spec, rows, dense):
    free = [0] + ([spec.K + 1] if spec.K + 1 <= spec.N else [])
    basis = [_propagate(spec, rows, f, Fraction(0), Fraction(1)) for f in free]
    checks = _check_rows(spec)
    R = [[_dot(dense[r], v) for v in basis] for r in checks]
    if len(free) == 1:
        lam = [Fraction(1)] if all(row[0] == 0 for row in R) else None
    else:
        nz = [row for row in R if any(row)]
        if not nz:
            lam = [Fraction(1), Fraction(0)]
        else:
            a, b = nz[0]
            lam = [b, -a]
            if any(row[0] * lam[0] + row[1] * lam[1] != 0 for row in nz):
                lam = None
    if lam is None:
        return None
    h = [sum(l * v[i] for l, v in zip(lam, basis)) for i in range(spec.N + 1)]
    if not any(h):
        return None
    return _normalize(h)


def _float_null(spec, rows, dense):
    zero, one = mpmath.mpf(0), mpmath.mpf(1)
    free = [0] + ([spec.K + 1] if spec.K + 1 <= spec.N else [])
    basis = [_propagate(spec, rows, f, zero, one) for f in free]
    if len(free) == 1:
        lam = [one]
    else:
        # scale the two basis vectors comparably before mixing them
        norms = [mpmath.sqrt(sum(abs(x) ** 2 for x in v)) for v in basis]
        basis = [[x / nv for x in v] for v, nv in zip(basis, norms)]
        R = mpmath.matrix([[_dot(dense[r], v) for v in basis] for r in _check_rows(spec)])
        _, _, V = mpmath.svd_r(R)
        lam = [V[V.rows - 1, 0], V[V.rows - 1, 1]]
    h = [sum(l * v[i] for l, v in zip(lam, basis)) for i in range(spec.N + 1)]
    return _normalize(h)


def null_vector(spec: ModelSpec, d, E) -> tuple:
    """Coefficient vector h_0..h_N annihilated by all N+2 recurrence rows.

    Rows other than K, N, N+1 are solved forward for h_{n+1}; h_0 and h_{K+1}
    are the free seeds (A_K = 0 decouples h_{K+1}), fixed by the leftover rows.
    Exact rational (d, E) gives an exact h when one exists. Returns
    ``(h, residual)`` with residual = max |row . h| / (|row| |h|).
    """
    if spec.is_symbolic:
        raise InvalidInput("null_vector needs numeric S and T")
    if _is_exact(d) and _is_exact(E):
        rows = _row_values(spec, Fraction(d), Fraction(E))
        dense = _dense_rows(spec, rows)
        h = _exact_null(spec, rows, dense)
        if h is not None:
            return tuple(h), _residual(dense, h)
    with mpmath.workdps(WORK_DPS):
        dm = _mpf(d) if _is_exact(d) else mpmath.mpf(d)
        Em = _mpf(E) if _is_exact(E) else mpmath.mpf(E)
        rows = _row_values(spec, dm, Em)
        dense = _dense_rows(spec, rows)
        h = _float_null(spec, rows, dense)
        res = _residual(dense, h)
        return tuple(+x for x in h), res


def numeric_rank(spec: ModelSpec, d, E, rel_tol: float = 1e-25) -> tuple:
    """(rank, singular values) of the (N+2) x (N+1) system at (d, E)."""
    with mpmath.workdps(WORK_DPS):
        dm = _mpf(d) if _is_exact(d) else mpmath.mpf(d)
        Em = _mpf(E) if _is_exact(E) else mpmath.mpf(E)
        dense = _dense_rows(spec, _row_values(spec, dm, Em))
        M = mpmath.matrix([[_mpf(x) if _is_exact(x) else x for x in row] for row in dense])
        sv = sorted((abs(s) for s in mpmath.svd_r(M, compute_uv=False)), reverse=True)
        top = max(sv[0], mpmath.mpf(1))
        rank = sum(1 for s in sv if s > top * rel_tol)
        return rank, [float(s) for s in sv]


# ---------------------------------------------------------------------------
# Spectrum assembly
# ---------------------------------------------------------------------------

def _energy_candidates(P: MultiPoly, d_exact, d_approx) -> list:
    """Real roots E of P(d, E) at the given charge; None if P(d, .) vanishes identically."""
    if d_exact is not None:
        Pd = P.subs({"d": d_exact})
        if Pd.is_zero():
            return None
        if Pd.degree("E") < 1:
            return []
        iso = isolate_real_roots(Pd)
        out = []
        for i in range(len(iso)):
            lo, hi = refine_interval(iso, i, WORK_WIDTH)
            out.append(lo if lo == hi else _mpf((lo + hi) / 2))
        return out
    coeffs = [c.evaluate({"d": d_approx}) if c else mpmath.mpf(0) for c in P.coeffs_in("E")]
    coeffs = [_mpf(c) if _is_exact(c) else c for c in coeffs]
    scale = max((abs(c) for c in coeffs), default=0)
    while coeffs and abs(coeffs[-1]) <= scale * mpmath.mpf(10) ** (-35):
        coeffs.pop()
    if not coeffs or scale == 0:
        return None
    if len(coeffs) == 1:
        return []
    roots = mpmath.polyroots(coeffs[::-1], maxsteps=200, extraprec=200)
    return [mpmath.re(r) for r in roots
            if abs(mpmath.im(r)) <= mpmath.mpf(10) ** (-25) * max(1, abs(r))]


def _relative_q(Q: MultiPoly, d, E) -> float:
    coeffs = Q.coeffs_in("E")
    total = mpmath.mpf(0)
    bound = mpmath.mpf(1)
    for k, c in enumerate(coeffs):
        v = c.evaluate({"d": d}) if c else 0
        v = _mpf(v) if _is_exact(v) else v
        total += v * E ** k
        bound += abs(v) * abs(E) ** k
    return float(abs(total) / bound)


def _charge_roots(pair, spec: ModelSpec, precision: Fraction) -> list:
    """[(AlgebraicValue, multiplicity, flags)] for every real root of the eliminant."""
    reduced = pair.reduced
    if reduced.is_constant():
        return []
    iso = isolate_real_roots(reduced)
    out = []
    for i in range(len(iso)):
        lo, hi = refine_interval(iso, i, min(precision, WORK_WIDTH))
        exact = lo if lo == hi else None
        shown = (lo, hi) if exact is not None else refine_interval(iso, i, precision)
        with mpmath.workdps(WORK_DPS):
            approx = _mpf(exact) if exact is not None else _mpf((lo + hi) / 2)
        out.append((AlgebraicValue(pair.eliminated, shown, approx, exact), iso.multiplicities[i]))
    return out


def solve_spectrum(spec: ModelSpec, precision=Fraction(1, 10 ** 12),
                   tol: float = PAIRING_TOL, include_rejected: bool = False) -> list:
    """All quasi-exact states (real d, real E) of a numeric instance, sorted by (d, E).

    Every returned state carries a null vector with residual <= 1e-10 (exactly
    zero when d, E are rational). Common roots of the two determinants that
    admit no common null vector (e.g. the K = 1 root d = S, or the factor
    d^3 - 24 at K = 2, N = 3, S = T = 0) fail that check; they are dropped
    unless ``include_rejected`` is set, in which case they come back with
    ``valid=False``.
    """
    if spec.is_symbolic:
        raise InvalidInput("solve_spectrum needs numeric S and T")
    precision = Fraction(precision)
    pair = eliminate(spec)
    states = []
    with mpmath.workdps(WORK_DPS):
        if spec.K == 0:
            zero = AlgebraicValue.rational(0)
            for root, mult in _charge_roots(pair, spec, precision):
                E = root.exact if root.exact is not None else root.approx
                states.append(_make_state(spec, zero, E, mult, frozenset()))
        else:
            charges = _charge_roots(pair, spec, precision)
            if spec.K == 1 and not any(c.exact == spec.S for c, _ in charges):
                charges.append((AlgebraicValue.rational(spec.S), 0))
            for charge, mult in charges:
                flags = set()
                if charge.exact == 0:
                    flags.add(CHARGE_ZERO)
                if spec.K == 1 and charge.exact == spec.S:
                    flags.add(EXCEPTIONAL)
                energies = _energy_candidates(pair.constraint, charge.exact, charge.approx)
                if energies is None:
                    energies = _energy_candidates(pair.secular, charge.exact, charge.approx) or []
                d_val = charge.value
                for E in energies:
                    Em = _mpf(E) if _is_exact(E) else E
                    if _relative_q(pair.secular, charge.approx, Em) >= tol:
                        continue
                    states.append(_make_state(spec, charge, E, mult, frozenset(flags), d_val))
    if not include_rejected:
        states = [st for st in states if st.valid]
    states.sort(key=QuasiExactState.sort_key)
    return states


def _make_state(spec, charge: AlgebraicValue, E, mult, flags, d_val=None):
    d_val = charge.value if d_val is None else d_val
    h, res = null_vector(spec, d_val, E)
    exact = charge.exact is not None and _is_exact(E) and all(_is_exact(x) for x in h)
    if exact:
        valid = res == 0
    else:
        valid = res <= RESIDUAL_TOL
    rank, _ = numeric_rank(spec, d_val, E)
    sym = None
    if exact and valid:
        sym = ansatz_residual(spec, Fraction(d_val), Fraction(E), h).is_zero()
    return QuasiExactState(charge, E, tuple(h), flags, mult, res, sym, rank, valid)


# ---------------------------------------------------------------------------
# Exact residual of the differential equation
# ---------------------------------------------------------------------------

def ansatz_residual(spec: ModelSpec, d, E, h) -> MultiPoly:
    """y^(L+2) e^(-F) (chi'' - L(L+1)chi/y^2 - d chi/y + c y chi - b y^2 chi
    - a y^3 chi - y^4 chi - E chi) for chi = e^F sum h_n y^(n-L),
    F = sigma y^3/3 + T y^2/2 + S y. A polynomial in y; zero iff exact solution."""
    if spec.is_symbolic:
        raise InvalidInput("residual needs numeric S and T")
    if not (_is_exact(d) and _is_exact(E) and all(_is_exact(x) for x in h)):
        raise UnsupportedError("exact residual needs rational d, E and h; use null_vector")
    d, E = Fraction(d), Fraction(E)
    s, S, T, L = spec.sigma, spec.S, spec.T, spec.L
    a = 2 * s * T
    b = 2 * s * S + T * T
    c = spec.c
    gens = ("y",)
    y = MultiPoly.variable("y", gens)
    Fp = s * y ** 2 + T * y + S          # F'
    Fpp = 2 * s * y + T                  # F''
    u0 = MultiPoly.constant(0, gens)      # y^L u
    u1 = MultiPoly.constant(0, gens)      # y^(L+1) u'
    u2 = MultiPoly.constant(0, gens)      # y^(L+2) u''
    for n, hn in enumerate(h):
        hn = Fraction(hn)
        if not hn:
            continue
        p = n - L
        u0 = u0 + hn * y ** n
        u1 = u1 + hn * p * y ** n
        u2 = u2 + hn * p * (p - 1) * y ** n
    out = (u2 + 2 * Fp * y * u1 + (Fpp + Fp * Fp) * y ** 2 * u0
           - L * (L + 1) * u0 - d * y * u0
           + (c * y - b * y ** 2 - a * y ** 3 - y ** 4 - E) * y ** 2 * u0)
    return out


def symbolic_residual(spec: ModelSpec, state: QuasiExactState) -> MultiPoly:
    return ansatz_residual(spec, state.d.exact if state.d.exact is not None else state.d.approx,
                           state.E, state.h)


# ---------------------------------------------------------------------------
# Wavefunction and normalizability
# ---------------------------------------------------------------------------

def _log_branch(y: complex, sigma: int) -> complex:
    z = cmath.log(y)
    if sigma == -1 and z.imag <= 0:
        z += 2j * math.pi
    return z


def evaluate_wavefunction(state: QuasiExactState, spec: ModelSpec, x: complex) -> complex:
    """psi(x) = chi(i x), chi(y) = exp(sigma y^3/3 + T y^2/2 + S y) sum h_n y^(n-L)."""
    x = complex(x)
    if x == 0:
        raise DomainError("the wavefunction is singular at x = 0")
    if spec.K % 2 and on_branch_cut(x, spec.sigma):
        raise DomainError(f"x = {x} lies on the branch cut")
    y = 1j * x
    s, S, T, L = spec.sigma, float(spec.S), float(spec.T), float(spec.L)
    logy = _log_branch(y, s)
    series = sum(complex(float(hn)) * cmath.exp((n - L) * logy) for n, hn in enumerate(state.h))
    return cmath.exp(s * y ** 3 / 3 + T * y ** 2 / 2 + S * y) * series


def log_magnitude(state: QuasiExactState, spec: ModelSpec, x: complex) -> float:
    """log |psi(x)| without overflow in the exponential."""
    y = 1j * complex(x)
    s, S, T, L = spec.sigma, float(spec.S), float(spec.T), float(spec.L)
    logy = _log_branch(y, s)
    series = sum(complex(float(hn)) * cmath.exp((n - L) * logy) for n, hn in enumerate(state.h))
    return (s * y ** 3 / 3 + T * y ** 2 / 2 + S * y).real + math.log(abs(series))


@dataclass(frozen=True)
class NormalizabilityVerdict:
    normalizable: bool
    tails: dict = field(default_factory=dict)  # t -> Re(exponent)


def check_normalizability(spec: ModelSpec, contour: Contour,
                          radii=(10.0, 20.0, 40.0, 80.0)) -> NormalizabilityVerdict:
    """Re(sigma y^3/3 + T y^2/2 + S y) along both tails must fall to -infinity."""
    if spec.is_symbolic:
        raise InvalidInput("normalizability needs numeric S and T")
    s, S, T = spec.sigma, float(spec.S), float(spec.T)
    tails = {}
    ok = True
    for sign in (1, -1):
        vals = []
        for r in radii:
            y = 1j * _curve(contour, sign * r)
            v = (s * y ** 3 / 3 + T * y ** 2 / 2 + S * y).real
            tails[sign * r] = v
            vals.append(v)
        decreasing = all(b < a for a, b in zip(vals, vals[1:]))
        ok = ok and decreasing and vals[-1] < -100.0
    return NormalizabilityVerdict(ok, tails)
