"""Problem instances, coupling maps, the banded recurrence system and contours."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import InvalidInput
from .polyalg import GENS, MultiPoly

_d = MultiPoly.variable("d")
_E = MultiPoly.variable("E")
_S = MultiPoly.variable("S")
_T = MultiPoly.variable("T")


def parse_rational(text) -> Fraction:
    """Exact rational from ``"p/q"``, an integer, or a finite decimal string."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"malformed rational {text!r}") from exc


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _check_sigma(sigma: int) -> int:
    if sigma not in (1, -1):
        raise InvalidInput(f"sigma must be +1 or -1, got {sigma!r}")
    return sigma


@dataclass(frozen=True)
class ModelSpec:
    """One quasi-exact problem: signature, K = 2L, termination degree N, and (S, T).

    ``S`` and ``T`` are exact rationals, or both ``None`` for symbolic mode in
    which they stay polynomial indeterminates.
    """

    sigma: int
    K: int
    N: int
    S: Fraction | None = Fraction(0)
    T: Fraction | None = Fraction(0)

    def __post_init__(self):
        _check_sigma(self.sigma)
        if not isinstance(self.K, int) or self.K < 0:
            raise InvalidInput(f"K must be a nonnegative integer, got {self.K!r}")
        if not isinstance(self.N, int) or self.N < 0:
            raise InvalidInput(f"N must be a nonnegative integer, got {self.N!r}")
        if (self.S is None) != (self.T is None):
            raise InvalidInput("S and T must both be numeric or both symbolic")
        if self.S is not None:
            object.__setattr__(self, "S", parse_rational(self.S))
            object.__setattr__(self, "T", parse_rational(self.T))

    @classmethod
    def symbolic(cls, sigma: int, K: int, N: int) -> "ModelSpec":
        return cls(sigma, K, N, None, None)

    @property
    def is_symbolic(self) -> bool:
        return self.S is None

    @property
    def L(self) -> Fraction:
        return Fraction(self.K, 2)

    @property
    def S_term(self):
        return _S if self.is_symbolic else self.S

    @property
    def T_term(self):
        return _T if self.is_symbolic else self.T

    @property
    def c(self):
        return linear_coupling(self)

    def couplings(self) -> "PhysicalCouplings":
        return physical_from_internal(self.S, self.T, self.sigma, self.c)

    def to_config(self) -> dict:
        return {
            "sigma": self.sigma,
            "K": self.K,
            "N": self.N,
            "S": "symbolic" if self.is_symbolic else format_rational(self.S),
            "T": "symbolic" if self.is_symbolic else format_rational(self.T),
        }

    @classmethod
    def from_config(cls, cfg: Mapping) -> "ModelSpec":
        try:
            sigma = int(str(cfg["sigma"]).replace("+", ""))
            K, N = int(cfg["K"]), int(cfg["N"])
        except (KeyError, ValueError) as exc:
            raise InvalidInput(f"bad model config {dict(cfg)!r}") from exc
        S, T = cfg.get("S", "0"), cfg.get("T", "0")
        if S == "symbolic" or T == "symbolic":
            return cls.symbolic(sigma, K, N)
        return cls(sigma, K, N, parse_rational(S), parse_rational(T))


@dataclass(frozen=True)
class PhysicalCouplings:
    """Cubic a, quadratic b and linear c couplings of the quartic potential."""

    a: Fraction
    b: Fraction
    c: Fraction


def internal_from_physical(a, b, sigma: int) -> tuple:
    """(T, S) with T = a/(2 sigma), S = (b - T^2)/(2 sigma)."""
    _check_sigma(sigma)
    a, b = parse_rational(a), parse_rational(b)
    T = a / (2 * sigma)
    S = (b - T * T) / (2 * sigma)
    return T, S


def physical_from_internal(S, T, sigma: int, c=None) -> PhysicalCouplings:
    _check_sigma(sigma)
    if S is None:
        raise InvalidInput("physical couplings need numeric S and T")
    S, T = parse_rational(S), parse_rational(T)
    return PhysicalCouplings(a=2 * sigma * T, b=2 * sigma * S + T * T,
                             c=None if c is None else parse_rational(c))


def linear_coupling(spec: ModelSpec):
    """c(N) = -2TS - sigma(2N - K + 2); a MultiPoly in symbolic mode."""
    tail = spec.sigma * (2 * spec.N - spec.K + 2)
    if spec.is_symbolic:
        return -2 * _T * _S - tail
    return -2 * spec.T * spec.S - tail


def from_bender_boettcher(a_bb, c_bb, J: int) -> ModelSpec:
    """Chargeless K = 0 instance of H = -p^2 - x^4 + 2iax^3 + cx^2 + i(a^3 - ac - 2J)x."""
    if not isinstance(J, int) or J < 1:
        raise InvalidInput(f"J must be a positive integer, got {J!r}")
    a, c = parse_rational(a_bb), parse_rational(c_bb)
    spec = ModelSpec(sigma=1, K=0, N=J - 1, S=(c - a * a) / 2, T=a)
    if linear_coupling(spec) != a ** 3 - a * c - 2 * J:
        raise AssertionError("coupling map inconsistent with the chargeless Hamiltonian")
    return spec


# ---------------------------------------------------------------------------
# Recurrence coefficients and the banded system
# ---------------------------------------------------------------------------

def _as_poly(x) -> MultiPoly:
    return x if isinstance(x, MultiPoly) else MultiPoly.constant(x)


def recurrence_coeffs(n: int, spec: ModelSpec) -> tuple:
    """(A_n, B_n, C_n, D_n) multiplying h_{n+1}, h_n, h_{n-1}, h_{n-2}."""
    if not 0 <= n <= spec.N + 1:
        raise InvalidInput(f"row index n={n} outside 0..{spec.N + 1}")
    K, S, T = spec.K, spec.S_term, spec.T_term
    A = (n + 1) * (n - K)
    B = S * (2 * n - K) - _d
    C = S * S + T * (2 * n - K - 1) - _E
    D = 2 * spec.sigma * (n - spec.N - 2)
    return _as_poly(A), _as_poly(B), _as_poly(C), _as_poly(D)


@dataclass(frozen=True)
class BandedSystem:
    """(N+2) x (N+1) recurrence matrix; row n holds A_n, B_n, C_n, D_n
    at columns n+1, n, n-1, n-2 (entries falling outside are dropped)."""

    spec: ModelSpec
    rows: tuple  # rows[n] = (A_n, B_n, C_n, D_n)

    @property
    def shape(self) -> tuple:
        return (self.spec.N + 2, self.spec.N + 1)

    def entry(self, row: int, col: int) -> MultiPoly:
        A, B, C, D = self.rows[row]
        offset = col - row
        cell = {1: A, 0: B, -1: C, -2: D}.get(offset)
        if cell is None or not 0 <= col <= self.spec.N:
            return MultiPoly.constant(0)
        return cell

    def dense(self) -> list:
        nr, nc = self.shape
        return [[self.entry(r, c) for c in range(nc)] for r in range(nr)]

    def block(self, rows: range, cols: range) -> list:
        return [[self.entry(r, c) for c in cols] for r in rows]

    def numeric(self, d, E) -> list:
        """Dense matrix with d and E bound to numbers (any numeric type)."""
        vals = {"d": d, "E": E}
        return [[cell.evaluate(vals) if cell else 0 for cell in row] for row in self.dense()]


def build_system(spec: ModelSpec) -> BandedSystem:
    return BandedSystem(spec, tuple(recurrence_coeffs(n, spec) for n in range(spec.N + 2)))


# ---------------------------------------------------------------------------
# Contours
# ---------------------------------------------------------------------------

STRAIGHT = "straight-line"
WEDGE = "wedge"


@dataclass(frozen=True)
class Contour:
    """Integration curve x(t) of signature sigma.

    ``straight-line``: x(t) = t - i sigma epsilon.
    ``wedge``: x(t) = t cos(phi) - i sigma sin(phi) sqrt(t^2 + epsilon^2), a
    hyperbola whose asymptotes make angle phi with the real axis and which
    crosses the imaginary axis at -i sigma epsilon sin(phi).
    """

    kind: str
    sigma: int = 1
    epsilon: float = 1.0
    phi: float = 0.0

    def __post_init__(self):
        if self.kind not in (STRAIGHT, WEDGE):
            raise InvalidInput(f"unknown contour kind {self.kind!r}")
        _check_sigma(self.sigma)

    @classmethod
    def straight(cls, epsilon: float, sigma: int = 1) -> "Contour":
        return cls(STRAIGHT, sigma, epsilon)

    @classmethod
    def wedge(cls, phi: float, sigma: int = 1, epsilon: float = 1.0) -> "Contour":
        return cls(WEDGE, sigma, epsilon, phi)


@dataclass(frozen=True)
class ContourVerdict:
    admissible: bool
    reason: str
    sectors: tuple  # indices k of the sectors S_k hosting the two tails


def sector_index(x: complex) -> int | None:
    """k in 1..6 with |arg x - (2k-1) pi/6| < pi/6, None on a sector boundary."""
    arg = math.atan2(x.imag, x.real) % (2 * math.pi)
    for k in range(1, 7):
        if abs(arg - (2 * k - 1) * math.pi / 6) < math.pi / 6:
            return k
    return None


def _tail_sectors(sigma: int) -> tuple:
    return (4, 6) if sigma == 1 else (1, 3)


def check_contour(contour: Contour, couplings: PhysicalCouplings | None = None) -> ContourVerdict:
    """Straight line needs 2 epsilon > |a|; a wedge needs 0 < phi < pi/3."""
    sectors = _tail_sectors(contour.sigma)
    if contour.kind == STRAIGHT:
        a = abs(float(couplings.a)) if couplings is not None else 0.0
        if contour.epsilon <= 0:
            return ContourVerdict(False, "epsilon must be positive", sectors)
        if not 2 * contour.epsilon > a:
            return ContourVerdict(False, f"2*epsilon = {2 * contour.epsilon:g} <= |a| = {a:g}", sectors)
        return ContourVerdict(True, f"2*epsilon = {2 * contour.epsilon:g} > |a| = {a:g}", sectors)
    if not 0 < contour.phi < math.pi / 3:
        return ContourVerdict(False, f"phi = {contour.phi:g} outside (0, pi/3)", sectors)
    if contour.epsilon <= 0:
        return ContourVerdict(False, "epsilon must be positive", sectors)
    return ContourVerdict(True, f"phi = {contour.phi:g} inside (0, pi/3)", sectors)


def _curve(contour: Contour, t: float) -> complex:
    s, eps = contour.sigma, contour.epsilon
    if contour.kind == STRAIGHT:
        return complex(t, -s * eps)
    return complex(t * math.cos(contour.phi),
                   -s * math.sin(contour.phi) * math.sqrt(t * t + eps * eps))


def contour_point(contour: Contour, t: float) -> complex:
    """x(t) on an intrinsically admissible contour (coupling-independent checks only)."""
    if contour.epsilon <= 0:
        raise InvalidInput("contour epsilon must be positive")
    if contour.kind == WEDGE and not 0 < contour.phi < math.pi / 3:
        raise InvalidInput(f"wedge angle {contour.phi} outside (0, pi/3)")
    return _curve(contour, t)


def contour_tangent(contour: Contour, t: float) -> complex:
    """dx/dt."""
    if contour.kind == STRAIGHT:
        return 1 + 0j
    eps = contour.epsilon
    return complex(math.cos(contour.phi),
                   -contour.sigma * math.sin(contour.phi) * t / math.sqrt(t * t + eps * eps))


def on_branch_cut(x: complex, sigma: int) -> bool:
    """The plane is cut along the positive imaginary x axis for sigma = +1,
    the negative one for sigma = -1."""
    return x.real == 0 and (x.imag > 0 if sigma == 1 else x.imag < 0)


def asymptotic_arg(contour: Contour, t: float) -> float:
    return cmath.phase(_curve(contour, t))


# ---------------------------------------------------------------------------
# Partial-wave bookkeeping
# ---------------------------------------------------------------------------

def interpret_K(K: int) -> list:
    """(l, D) pairs with K = 2l + D - 3; in one dimension only l in {0, 1} exist."""
    if not isinstance(K, int) or K < 0:
        raise InvalidInput(f"K must be a nonnegative integer, got {K!r}")
    out = []
    for ell in range(0, K // 2 + 2):
        D = K + 3 - 2 * ell
        if D < 1 or (D == 1 and ell > 1):
            continue
        out.append((ell, D))
    return out
