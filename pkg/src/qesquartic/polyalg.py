"""Exact polynomial kernel.

Sparse multivariate polynomials over the rationals (integer coefficients in
every case the model produces), fraction-free determinants, Sylvester
resultants, square-free parts and Sturm-chain real-root isolation for
univariate polynomials.

Generators default to ``("d", "E", "S", "T")`` in that priority, which is
also the lexicographic tie-break of the graded term order.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from numbers import Rational
from typing import Iterable, Mapping, Sequence, Union

from .errors import InvalidInput

GENS = ("d", "E", "S", "T")

Number = Union[int, Fraction]
Exponent = tuple  # tuple[int, ...], one entry per generator

# Parameters are printed in front of the unknowns ("S*d^2", "S*T*d", "E*d").
_DISPLAY_RANK = {"S": 0, "T": 1, "E": 2, "d": 3}


def _norm(c) -> Number:
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return _norm(Fraction(c.numerator, c.denominator))
    raise InvalidInput(f"coefficient must be rational, got {c!r}")


def _qdiv(a: Number, b: Number) -> Number:
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        if r == 0:
            return q
    return _norm(Fraction(a) / b)


def _order_key(e: Exponent):
    return (sum(e), e)


class MultiPoly:
    """Immutable sparse polynomial ``{exponent tuple: coefficient}``.

    Zero coefficients are never stored. Two polynomials compare equal iff
    their generator tuples and term maps are identical.
    """

    __slots__ = ("_terms", "gens", "_hash")

    def __init__(self, terms: Mapping[Exponent, Number] | None = None,
                 gens: Sequence[str] = GENS):
        self.gens = tuple(gens)
        n = len(self.gens)
        clean: dict = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n or min(e, default=0) < 0:
                raise InvalidInput(f"bad exponent {e} for generators {self.gens}")
            c = _norm(c)
            if c:
                clean[e] = clean.get(e, 0) + c
                if not clean[e]:
                    del clean[e]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, gens: tuple) -> "MultiPoly":
        obj = object.__new__(cls)
        obj._terms = terms
        obj.gens = gens
        obj._hash = None
        return obj

    # -- construction -------------------------------------------------
    @classmethod
    def constant(cls, c, gens: Sequence[str] = GENS) -> "MultiPoly":
        gens = tuple(gens)
        c = _norm(c)
        return cls._raw({(0,) * len(gens): c} if c else {}, gens)

    @classmethod
    def variable(cls, name: str, gens: Sequence[str] = GENS) -> "MultiPoly":
        gens = tuple(gens)
        if name not in gens:
            raise InvalidInput(f"unknown variable {name!r}; generators are {gens}")
        e = [0] * len(gens)
        e[gens.index(name)] = 1
        return cls._raw({tuple(e): 1}, gens)

    @classmethod
    def from_univariate(cls, coeffs: Sequence, var: str,
                        gens: Sequence[str] | None = None) -> "MultiPoly":
        """Build ``sum coeffs[k] * var**k``."""
        gens = tuple(gens) if gens is not None else (var,)
        i = gens.index(var)
        terms = {}
        for k, c in enumerate(coeffs):
            c = _norm(c)
            if c:
                e = [0] * len(gens)
                e[i] = k
                terms[tuple(e)] = c
        return cls._raw(terms, gens)

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.gens != self.gens:
                raise InvalidInput(f"generator mismatch: {self.gens} vs {other.gens}")
            return other
        return MultiPoly.constant(other, self.gens)

    # -- inspection ---------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self) -> Number:
        if not self.is_constant():
            raise InvalidInput(f"{self} is not constant")
        return self._terms.get((0,) * len(self.gens), 0)

    def variables(self) -> tuple:
        used = set()
        for e in self._terms:
            used.update(i for i, x in enumerate(e) if x)
        return tuple(g for i, g in enumerate(self.gens) if i in used)

    def degree(self, var: str | None = None) -> int:
        """Degree in ``var`` (total degree if None); -1 for the zero polynomial."""
        if not self._terms:
            return -1
        if var is None:
            return max(sum(e) for e in self._terms)
        i = self.gens.index(var)
        return max(e[i] for e in self._terms)

    def sorted_terms(self) -> list:
        """Terms in descending graded-lexicographic order."""
        return sorted(self._terms.items(), key=lambda kv: _order_key(kv[0]), reverse=True)

    def leading_term(self) -> tuple:
        if not self._terms:
            raise InvalidInput("zero polynomial has no leading term")
        e = max(self._terms, key=_order_key)
        return e, self._terms[e]

    def leading_coeff(self) -> Number:
        return self.leading_term()[1]

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self._terms)
        for e, c in other._terms.items():
            v = terms.get(e, 0) + c
            if v:
                terms[e] = _norm(v)
            else:
                terms.pop(e, None)
        return MultiPoly._raw(terms, self.gens)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({e: -c for e, c in self._terms.items()}, self.gens)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = _norm(other)
            if not c:
                return MultiPoly._raw({}, self.gens)
            return MultiPoly._raw({e: _norm(v * c) for e, v in self._terms.items()}, self.gens)
        other = self._coerce(other)
        terms: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return MultiPoly._raw({e: _norm(c) for e, c in terms.items() if c}, self.gens)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise InvalidInput("exponent must be a nonnegative integer")
        result = MultiPoly.constant(1, self.gens)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.gens == other.gens and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == MultiPoly.constant(other, self.gens)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.gens, frozenset(self._terms.items())))
        return self._hash

    def exact_div(self, other) -> "MultiPoly":
        """Quotient of an exact division; raises if a remainder is left."""
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if other.is_constant():
            c = other.constant_value()
            return MultiPoly._raw({e: _qdiv(v, c) for e, v in self._terms.items()}, self.gens)
        le, lc = other.leading_term()
        rest = [(e, c) for e, c in other._terms.items() if e != le]
        rem = dict(self._terms)
        quot: dict = {}
        while rem:
            e = max(rem, key=_order_key)
            c = rem.pop(e)
            qe = tuple(a - b for a, b in zip(e, le))
            if min(qe) < 0:
                raise ArithmeticError("inexact polynomial division")
            qc = _qdiv(c, lc)
            quot[qe] = qc
            for e2, c2 in rest:
                t = tuple(a + b for a, b in zip(qe, e2))
                v = rem.get(t, 0) - qc * c2
                if v:
                    rem[t] = _norm(v)
                else:
                    rem.pop(t, None)
        return MultiPoly._raw(quot, self.gens)

    # -- substitution / evaluation ------------------------------------
    def subs(self, mapping: Mapping[str, object]) -> "MultiPoly":
        """Substitute rationals or same-generator polynomials for variables."""
        idx = {self.gens.index(v): val for v, val in mapping.items()}
        if not idx:
            return self
        powcache: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in powcache:
                val = idx[i]
                if isinstance(val, MultiPoly):
                    powcache[key] = self._coerce(val) ** k
                else:
                    powcache[key] = _norm(val) ** k
            return powcache[key]

        out = MultiPoly._raw({}, self.gens)
        acc: dict = {}
        for e, c in self._terms.items():
            keep = list(e)
            factor: object = c
            for i in idx:
                if e[i]:
                    p = power(i, e[i])
                    keep[i] = 0
                    factor = p * factor if isinstance(p, MultiPoly) else factor * p
            keep = tuple(keep)
            if isinstance(factor, MultiPoly):
                mono = MultiPoly._raw({keep: 1}, self.gens)
                out = out + factor * mono
            else:
                factor = _norm(factor)
                v = acc.get(keep, 0) + factor
                if v:
                    acc[keep] = v
                else:
                    acc.pop(keep, None)
        return out + MultiPoly._raw(acc, self.gens)

    def evaluate(self, values: Mapping[str, object]):
        """Numeric value with every occurring variable bound (any numeric type)."""
        missing = [v for v in self.variables() if v not in values]
        if missing:
            raise InvalidInput(f"unbound variables {missing}")
        vals = [values.get(g) for g in self.gens]
        total = 0
        for e, c in self._terms.items():
            term = c
            for v, k in zip(vals, e):
                if k:
                    term = term * v ** k
            total = total + term
        return total

    def coeffs_in(self, var: str) -> list:
        """Coefficients (as polynomials free of ``var``) of ``var**0, var**1, ...``."""
        i = self.gens.index(var)
        buckets: dict = {}
        for e, c in self._terms.items():
            k = e[i]
            e0 = e[:i] + (0,) + e[i + 1:]
            buckets.setdefault(k, {})[e0] = c
        deg = max(buckets, default=-1)
        return [MultiPoly._raw(buckets.get(k, {}), self.gens) for k in range(deg + 1)]

    def is_univariate(self, var: str | None = None) -> bool:
        vs = self.variables()
        if var is None:
            return len(vs) <= 1
        return set(vs) <= {var}

    def to_univariate(self, var: str | None = None) -> list:
        """Dense coefficient list, lowest degree first."""
        if var is None:
            vs = self.variables()
            if len(vs) > 1:
                raise InvalidInput(f"{self} is not univariate")
            var = vs[0] if vs else self.gens[0]
        if not self.is_univariate(var):
            raise InvalidInput(f"{self} has variables other than {var!r}: {self.variables()}")
        i = self.gens.index(var)
        out = [0] * (self.degree(var) + 1)
        for e, c in self._terms.items():
            out[e[i]] = c
        return out

    def rename(self, gens: Sequence[str]) -> "MultiPoly":
        gens = tuple(gens)
        if len(gens) != len(self.gens):
            raise InvalidInput("rename needs the same number of generators")
        return MultiPoly._raw(dict(self._terms), gens)

    def project(self, var: str, gens: Sequence[str] | None = None) -> "MultiPoly":
        """Re-home a polynomial in ``var`` alone onto another generator tuple."""
        gens = tuple(gens) if gens is not None else (var,)
        return MultiPoly.from_univariate(self.to_univariate(var), var, gens)

    # -- normalisation ------------------------------------------------
    def content(self) -> Fraction:
        """Positive rational c with self / c having coprime integer coefficients."""
        if not self._terms:
            return Fraction(0)
        nums = [Fraction(c).numerator for c in self._terms.values()]
        dens = [Fraction(c).denominator for c in self._terms.values()]
        g = reduce(math.gcd, (abs(n) for n in nums))
        l = reduce(lambda a, b: a * b // math.gcd(a, b), dens)
        return Fraction(g, l)

    def primitive(self) -> "MultiPoly":
        """Integer primitive part with positive leading (graded-lex) coefficient."""
        if not self._terms:
            return self
        c = self.content()
        if self.leading_coeff() < 0:
            c = -c
        return self * (1 / c)

    def same_up_to_scale(self, other: "MultiPoly") -> bool:
        return self.primitive() == self._coerce(other).primitive()

    # -- text ---------------------------------------------------------
    def _monomial_text(self, e: Exponent) -> str:
        parts = []
        order = sorted(range(len(self.gens)),
                       key=lambda i: (_DISPLAY_RANK.get(self.gens[i], 99), i))
        for i in order:
            k = e[i]
            if k == 1:
                parts.append(self.gens[i])
            elif k > 1:
                parts.append(f"{self.gens[i]}^{k}")
        return "*".join(parts)

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for n, (e, c) in enumerate(self.sorted_terms()):
            mono = self._monomial_text(e)
            neg = c < 0
            mag = -c if neg else c
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            if n == 0:
                pieces.append(("-" if neg else "") + body)
            else:
                pieces.append((" - " if neg else " + ") + body)
        return "".join(pieces)

    __str__ = to_text

    def __repr__(self) -> str:
        return f"MultiPoly({self.to_text()!r}, gens={self.gens})"

    @classmethod
    def from_text(cls, text: str, gens: Sequence[str] = GENS) -> "MultiPoly":
        """Parse the canonical text form (also accepts any term order)."""
        gens = tuple(gens)
        s = text.replace(" ", "")
        if not s:
            raise InvalidInput("empty polynomial text")
        if s == "0":
            return cls._raw({}, gens)
        terms: dict = {}
        pos = 0
        term_re = re.compile(r"([+-]?)([^+-]+)")
        for m in term_re.finditer(s):
            if m.start() != pos:
                raise InvalidInput(f"cannot parse {text!r}")
            pos = m.end()
            sign = -1 if m.group(1) == "-" else 1
            coef: Number = sign
            exps = [0] * len(gens)
            for factor in m.group(2).split("*"):
                if re.fullmatch(r"\d+(/\d+)?", factor):
                    coef = coef * Fraction(factor)
                    continue
                fm = re.fullmatch(r"([A-Za-z_]\w*)(\^(\d+))?", factor)
                if not fm or fm.group(1) not in gens:
                    raise InvalidInput(f"bad factor {factor!r} in {text!r}")
                exps[gens.index(fm.group(1))] += int(fm.group(3) or 1)
            key = tuple(exps)
            terms[key] = terms.get(key, 0) + coef
        if pos != len(s):
            raise InvalidInput(f"cannot parse {text!r}")
        return cls(terms, gens)


def as_poly(x, gens: Sequence[str] = GENS) -> MultiPoly:
    return x if isinstance(x, MultiPoly) else MultiPoly.constant(x, gens)


# ---------------------------------------------------------------------------
# Determinants and resultants
# ---------------------------------------------------------------------------

def det_fraction_free(M: Sequence[Sequence]) -> MultiPoly:
    """Bareiss determinant of a square matrix of polynomials.

    Every intermediate is a polynomial: each update is divided exactly by the
    previous pivot. Row swaps are used when a pivot vanishes.
    """
    n = len(M)
    if n == 0:
        raise InvalidInput("determinant of a 0x0 matrix")
    if any(len(row) != n for row in M):
        raise InvalidInput("matrix is not square")
    gens = next((x.gens for row in M for x in row if isinstance(x, MultiPoly)), GENS)
    A = [[as_poly(x, gens) for x in row] for row in M]
    sign = 1
    prev = MultiPoly.constant(1, gens)
    for k in range(n - 1):
        if A[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not A[i][k].is_zero()), None)
            if swap is None:
                return MultiPoly.constant(0, gens)
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        pivot = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            for j in range(k + 1, n):
                num = pivot * A[i][j]
                if not aik.is_zero() and not A[k][j].is_zero():
                    num = num - aik * A[k][j]
                A[i][j] = num.exact_div(prev)
        prev = pivot
    return A[n - 1][n - 1] if sign > 0 else -A[n - 1][n - 1]


def sylvester_matrix(p: MultiPoly, q: MultiPoly, var: str) -> list:
    pc = p.coeffs_in(var)[::-1]
    qc = q.coeffs_in(var)[::-1]
    m, n = len(pc) - 1, len(qc) - 1
    zero = MultiPoly.constant(0, p.gens)
    size = m + n
    rows = []
    for i in range(n):
        rows.append([zero] * i + pc + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + qc + [zero] * (size - n - 1 - i))
    return rows


def resultant(p: MultiPoly, q: MultiPoly, var: str) -> MultiPoly:
    """Sylvester resultant Res_var(p, q), a polynomial in the other variables."""
    q = p._coerce(q)
    if p.degree(var) < 1 or q.degree(var) < 1:
        raise InvalidInput(f"both arguments need positive degree in {var!r}")
    return det_fraction_free(sylvester_matrix(p, q, var))


# ---------------------------------------------------------------------------
# Dense univariate helpers (integer coefficient lists, lowest degree first)
# ---------------------------------------------------------------------------

def _trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _to_int_list(coeffs: Sequence) -> list:
    fr = [Fraction(c) for c in coeffs]
    l = reduce(lambda x, y: x * y // math.gcd(x, y), (c.denominator for c in fr), 1)
    return _trim([int(c * l) for c in fr])


def _prim(a: list) -> list:
    """Primitive part with positive leading coefficient."""
    a = _trim(list(a))
    if not a:
        return a
    g = reduce(math.gcd, (abs(x) for x in a))
    if a[-1] < 0:
        g = -g
    return [x // g for x in a]


def _deriv(a: list) -> list:
    return _trim([k * a[k] for k in range(1, len(a))])


def _rem_signed(a: list, b: list) -> list:
    """Positive multiple of the remainder of a by b (integers only)."""
    r = list(a)
    lb = b[-1]
    db = len(b) - 1
    steps = 0
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [x * lb for x in r]
        for i, bi in enumerate(b):
            r[shift + i] -= lr * bi
        r.pop()
        _trim(r)
        steps += 1
    if lb < 0 and steps % 2:
        r = [-x for x in r]
    return r


def _gcd(a: list, b: list) -> list:
    a, b = _prim(a), _prim(b)
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _prim(_rem_signed(a, b))
        a, b = b, r
    return _prim(a)


def _divexact(a: list, b: list) -> list:
    r = [Fraction(x) for x in a]
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    for k in range(len(q) - 1, -1, -1):
        c = r[k + len(b) - 1] / b[-1]
        q[k] = c
        for i, bi in enumerate(b):
            r[k + i] -= c * bi
    if any(r):
        raise ArithmeticError("inexact univariate division")
    return _to_int_list(q)


def _eval_sign(a: list, x: Fraction) -> int:
    n, den = x.numerator, x.denominator
    deg = len(a) - 1
    total = 0
    npow = 1
    dpow = den ** deg
    for k, c in enumerate(a):
        if c:
            total += c * npow * dpow
        npow *= n
        if k < deg:
            dpow //= den
    return (total > 0) - (total < 0)


def _eval_exact(a: list, x: Fraction) -> Fraction:
    total = Fraction(0)
    for c in reversed(a):
        total = total * x + c
    return total


def _sturm_chain(a: list) -> list:
    chain = [_prim(a), _prim(_deriv(a))]
    while len(chain[-1]) > 1:
        r = _rem_signed(chain[-2], chain[-1])
        if not r:
            break
        chain.append(_neg_prim(r))
    return chain


def _neg_prim(r: list) -> list:
    g = reduce(math.gcd, (abs(x) for x in r))
    return [-x // g for x in r]


def _variations(signs: Iterable[int]) -> int:
    v = 0
    last = 0
    for s in signs:
        if s:
            if last and s != last:
                v += 1
            last = s
    return v


def _var_at(chain: list, x: Fraction) -> int:
    return _variations(_eval_sign(p, x) for p in chain)


def _var_at_inf(chain: list, positive: bool) -> int:
    signs = []
    for p in chain:
        s = 1 if p[-1] > 0 else -1
        if not positive and (len(p) - 1) % 2:
            s = -s
        signs.append(s)
    return _variations(signs)


def _count_open(chain: list, lo: Fraction, hi: Fraction) -> int:
    """Distinct roots of chain[0] strictly inside (lo, hi)."""
    n = _var_at(chain, lo) - _var_at(chain, hi)
    if _eval_sign(chain[0], hi) == 0:
        n -= 1
    return n


def _simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational with the smallest denominator in the open interval (lo, hi)."""
    if lo < 0 < hi:
        return Fraction(0)
    if hi <= 0:
        return -_simplest_between(-hi, -lo)
    fl = math.floor(lo)
    if fl + 1 < hi:
        return Fraction(fl + 1)
    a, b = lo - fl, hi - fl
    if a == 0:
        return fl + Fraction(1, math.floor(1 / b) + 1)
    return fl + 1 / _simplest_between(1 / b, 1 / a)


def _cauchy_bound(a: list) -> int:
    lead = abs(a[-1])
    return 1 + max((-(-abs(c) // lead) for c in a[:-1]), default=0)


# ---------------------------------------------------------------------------
# Univariate operations on MultiPoly
# ---------------------------------------------------------------------------

def _univariate(p: MultiPoly, what: str) -> tuple:
    if p.is_zero():
        raise InvalidInput(f"{what}: zero polynomial")
    vs = p.variables()
    if len(vs) > 1:
        raise InvalidInput(f"{what}: expected a univariate polynomial, got variables {vs}")
    var = vs[0] if vs else p.gens[0]
    return var, _to_int_list(p.to_univariate(var))


def squarefree_part(p: MultiPoly) -> MultiPoly:
    """Product of the distinct irreducible factors, integer primitive, positive lead."""
    var, a = _univariate(p, "squarefree_part")
    if len(a) <= 1:
        return MultiPoly.constant(1, p.gens)
    g = _gcd(a, _deriv(a))
    return MultiPoly.from_univariate(_prim(_divexact(_prim(a), g)), var, p.gens)


def _gcd_tower(a: list) -> list:
    """a, gcd(a, a'), gcd of that with its derivative, ... down to a constant."""
    tower = [_prim(a)]
    while len(tower[-1]) > 1:
        tower.append(_gcd(tower[-1], _deriv(tower[-1])))
    return tower


@dataclass(frozen=True)
class RootIsolation:
    """Disjoint rational intervals, one per distinct real root of ``poly``.

    An interval ``(lo, hi)`` with ``lo < hi`` contains its root strictly inside;
    ``lo == hi`` marks an exactly located rational root.
    """

    poly: MultiPoly
    var: str
    intervals: tuple
    precision: Fraction
    multiplicities: tuple
    _chain: list = field(repr=False, compare=False, default_factory=list)

    def __len__(self) -> int:
        return len(self.intervals)

    def is_exact(self, index: int) -> bool:
        lo, hi = self.intervals[index]
        return lo == hi

    def approximations(self) -> list:
        return [float((lo + hi) / 2) for lo, hi in self.intervals]


def _find_exact(chain: list, lo: Fraction, hi: Fraction) -> Fraction | None:
    r = _simplest_between(lo, hi)
    if _eval_sign(chain[0], r) == 0:
        return r
    return None


def _shrink(chain: list, lo: Fraction, hi: Fraction, width: Fraction) -> tuple:
    """Bisect (lo, hi), which holds exactly one root, down to ``width``.

    Rational roots of the integer polynomial are multiples of 1/lc, so once the
    interval is narrower than 1/lc a single candidate decides exactness.
    """
    if lo == hi:
        return lo, hi
    sq = chain[0]
    lc = abs(sq[-1])
    exact = _find_exact(chain, lo, hi)
    if exact is not None:
        return exact, exact
    s_lo = _eval_sign(sq, lo)
    # a simple root inside an isolating interval shows up as a sign change
    by_sign = s_lo != 0 and _eval_sign(sq, hi) == -s_lo
    probed = False
    while hi - lo > width:
        mid = (lo + hi) / 2
        s_mid = _eval_sign(sq, mid)
        if s_mid == 0:
            return mid, mid
        if by_sign:
            left = s_mid != s_lo
        else:
            left = _count_open(chain, lo, mid) > 0
        if left:
            hi = mid
        else:
            lo = mid
        if not probed and (hi - lo) * lc < 1:
            probed = True
            cand = Fraction(math.ceil(lo * lc), lc)
            if lo <= cand <= hi and _eval_sign(sq, cand) == 0:
                return cand, cand
    if not probed:
        exact = _find_exact(chain, lo, hi)
        if exact is not None:
            return exact, exact
    return lo, hi


def isolate_real_roots(p: MultiPoly, precision=None) -> RootIsolation:
    """Sturm isolation of every distinct real root of a numeric univariate polynomial.

    ``precision`` (optional) caps the interval widths. Multiplicities of the
    original polynomial are reported alongside, in interval order.
    """
    if not p.is_zero() and len(p.variables()) > 1:
        raise InvalidInput(f"isolate_real_roots: free variables {p.variables()} present")
    var, a = _univariate(p, "isolate_real_roots")
    sq = _prim(_divexact(_prim(a), _gcd(a, _deriv(a)))) if len(a) > 1 else [1]
    sqpoly = MultiPoly.from_univariate(sq, var, p.gens)
    if len(sq) <= 1:
        return RootIsolation(sqpoly, var, (), Fraction(precision or 0), (), [sq])
    chain = _sturm_chain(sq)
    B = Fraction(_cauchy_bound(sq))
    found = []
    stack = [(-B, B)]
    while stack:
        lo, hi = stack.pop()
        n = _count_open(chain, lo, hi)
        if n == 0:
            continue
        if n == 1:
            found.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        if _eval_sign(sq, mid) == 0:
            found.append((mid, mid))
        stack.append((lo, mid))
        stack.append((mid, hi))
    found.sort()
    width = Fraction(precision) if precision is not None else None
    out = []
    for lo, hi in found:
        if lo != hi:
            exact = _find_exact(chain, lo, hi)
            if exact is not None:
                lo = hi = exact
            elif width is not None:
                lo, hi = _shrink(chain, lo, hi, width)
        out.append((lo, hi))
    # multiplicity: 1 + number of gcd-tower levels that still vanish at the root
    tower = _gcd_tower(a)
    mults = []
    for lo, hi in out:
        m = 1
        for g in tower[1:]:
            if len(g) <= 1:
                break
            if lo == hi:
                hit = _eval_sign(g, lo) == 0
            else:
                hit = _count_open(_sturm_chain(g), lo, hi) > 0
            if not hit:
                break
            m += 1
        mults.append(m)
    max_w = max((hi - lo for lo, hi in out), default=Fraction(0))
    return RootIsolation(sqpoly, var, tuple(out), width if width is not None else max_w,
                         tuple(mults), chain)


def refine_root(iso: RootIsolation, index: int, precision) -> Fraction:
    """Midpoint of the index-th isolating interval after shrinking it to ``precision``.

    The true root lies within ``precision`` of the returned rational; an exact
    rational root is returned as such.
    """
    if not 0 <= index < len(iso.intervals):
        raise IndexError(f"root index {index} out of range (0..{len(iso.intervals) - 1})")
    precision = Fraction(precision)
    if precision <= 0:
        raise InvalidInput("precision must be positive")
    chain = iso._chain or _sturm_chain(_to_int_list(iso.poly.to_univariate(iso.var)))
    lo, hi = iso.intervals[index]
    lo, hi = _shrink(chain, lo, hi, precision)
    return lo if lo == hi else (lo + hi) / 2


def refine_interval(iso: RootIsolation, index: int, precision) -> tuple:
    """Like :func:`refine_root` but returns the certified interval itself."""
    if not 0 <= index < len(iso.intervals):
        raise IndexError(f"root index {index} out of range")
    chain = iso._chain or _sturm_chain(_to_int_list(iso.poly.to_univariate(iso.var)))
    lo, hi = iso.intervals[index]
    return _shrink(chain, lo, hi, Fraction(precision))


def sturm_count(p: MultiPoly) -> int:
    """Distinct real roots predicted by the Sturm chain at -inf and +inf."""
    _, a = _univariate(p, "sturm_count")
    sq = _prim(_divexact(_prim(a), _gcd(a, _deriv(a)))) if len(a) > 1 else [1]
    if len(sq) <= 1:
        return 0
    chain = _sturm_chain(sq)
    return _var_at_inf(chain, False) - _var_at_inf(chain, True)


def sparsity_reduce(p: MultiPoly, var: str | None = None, new_var: str = "x") -> tuple:
    """Write p(v) = v**shift * q(v**gap) and return (q, gap, shift).

    ``q`` is univariate in ``new_var``; gap is 1 when nothing can be reduced.
    """
    if p.is_zero():
        raise InvalidInput("sparsity_reduce: zero polynomial")
    if var is None:
        var, _ = _univariate(p, "sparsity_reduce")
    coeffs = p.to_univariate(var)
    exps = [k for k, c in enumerate(coeffs) if c]
    shift = exps[0]
    gap = reduce(math.gcd, (k - shift for k in exps), 0) or 1
    q = [0] * ((exps[-1] - shift) // gap + 1)
    for k in exps:
        q[(k - shift) // gap] = coeffs[k]
    return MultiPoly.from_univariate(q, new_var, (new_var,)), gap, shift


def expand_sparsity(q: MultiPoly, gap: int, shift: int, var: str,
                    gens: Sequence[str] = GENS) -> MultiPoly:
    """Inverse of :func:`sparsity_reduce`: v**shift * q(v**gap)."""
    (qv,) = q.gens
    coeffs = q.to_univariate(qv)
    out = [0] * (shift + gap * (len(coeffs) - 1) + 1)
    for k, c in enumerate(coeffs):
        out[shift + gap * k] = c
    return MultiPoly.from_univariate(out, var, gens)
