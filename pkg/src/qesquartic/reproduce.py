"""Named reproduction tables with embedded golden values.

Each table recomputes one published artifact (a polynomial, a root table, a
structural identity or an oracle comparison) and diffs it against the values
frozen below.  Golden numbers are annotated where the printed prose and the
printed polynomials disagree.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .model import Contour, ModelSpec, from_bender_boettcher, linear_coupling, recurrence_coeffs
from .polyalg import MultiPoly, expand_sparsity, isolate_real_roots, refine_root, sparsity_reduce
from .secular import eliminate, secular_poly, substitution_route
from .spectrum import RESIDUAL_TOL, solve_spectrum

_S = MultiPoly.variable("S")

# ---------------------------------------------------------------------------
# Golden values
# ---------------------------------------------------------------------------

K1_N1_CUBIC = "-d^3 - S*d^2 + S^2*d + 2*T*d + 2*sigma + S^3 + 2*S*T"
K1_N2_QUINTIC = (
    "d^5 + S*d^4 - 2*S^2*d^3 - 6*T*d^3 - 6*d^2 - 2*S^3*d^2 - 6*S*T*d^2"
    " + 6*S^2*T*d + 4*S*d + 8*T^2*d + S^4*d"
    " + 10*S^2 + 16*T + 6*S^3*T + 8*S*T^2 + S^5")
K1_N3_SEPTIC = (
    "-d^7 - S*d^6 + 12*T*d^5 + 3*S^2*d^5 + 12*d^4 + 12*S*T*d^4 + 3*S^3*d^4"
    " - 16*S*d^3 - 44*T^2*d^3 - 3*S^4*d^3 - 24*S^2*T*d^3"
    " - 40*S^2*d^2 - 88*T*d^2 - 44*S*T^2*d^2 - 3*S^5*d^2 - 24*S^3*T*d^2"
    " + 12*d + 16*S^3*d + S^6*d + 44*S^2*T^2*d + 64*S*T*d + 48*T^3*d + 12*S^4*T*d"
    " + 152*S^2*T + 28*S^4 + 84*S + 144*T^2 + S^7 + 44*S^3*T^2 + 48*S*T^3 + 12*S^5*T")
K0_STZ = {3: "E^4 - 96*E", 4: "-E^5 + 336*E^2"}
K1_STZ = {
    1: "-d^3 + 2*sigma",
    2: "d^5 - 6*sigma*d^2",
    3: "-d^7 + 12*sigma*d^4 + 12*d",
    4: "d^9 - 20*sigma*d^6 - 76*d^3 + 512*sigma",
}
K2_N3_QUARTIC = "x^4 + 331776 - 96*x^3 + 384*x^2 + 18432*x"

SAMPLE_TRIPLET = (-5.303953910, -3.103253421, 5.407207331)
K2_X2 = 88.87294116
K2_X1 = 24
K2_D_PLUS = (2.88, 4.46)
K2_X_MINUS = (-199.78, -72.00, -14.65, -1.57)
K2_D_MINUS = (-5.84, -4.16, -2.45, -1.16)
K0_N13 = (9.381, 17.768, 26.487, 35.535)
K1_STZ_ROOTS = {1: (1.26,), 3: (-0.975, 2.35), 4: (-1.83, 1.55, 2.82)}
K1_STZ_N2_PROSE = 1.71
K0_N3_PROSE = 4.48
K0_N4_PROSE = 6.95
FLIP_WIDTH = Fraction(1, 10 ** 15)

NOTE_N2_PROSE = ("printed prose value d ~ 1.71 disagrees with the printed polynomial "
                 "d^5 - 6 d^2, whose nonzero root is 6^(1/3) = 1.8171; the polynomial is used")
NOTE_N3_PROSE = ("printed prose value E ~ 4.48 disagrees with the printed polynomial "
                 "E^4 - 96 E, whose nonzero root is 96^(1/3) = 4.5789; the polynomial is used")
NOTE_SIGMA_TRIPLET = "sigma is not stated for the sample triplet; sigma = +1 reproduces it"
NOTE_X1 = ("x = 24 (d = 24^(1/3)) is a root of the quartic but the full recurrence has no "
           "null vector there: the constraint-block null vector has a vanishing first entry")
NOTE_SIGMA_MINUS = ("the printed sigma = -1 quadruplet is not reproduced: the flip "
                    "(sigma, S, d) -> (-sigma, -S, -d) maps the sigma = +1 quartic to one with "
                    "roots x = -24, -88.873 only; the printed values are the roots of "
                    "(x + 72)(x^3 + 216 x^2 + 3264 x + 4608), obtained when sigma = -1 enters "
                    "the subdiagonal but sigma = +1 is kept in the energy branch")
NOTE_K3_TYPO = "the K = 3 quadratic ending in '-0' is read as '= 0'"
NOTE_DOUBLE_LEVEL = ("E = 0 is a double root here (an exceptional point); a finite-difference "
                     "discretisation splits it into a complex pair whose imaginary parts shrink "
                     "only linearly with the spacing, so |Im E| < 1e-3 needs roughly 50000 points")


def golden_poly(text: str, sigma: int = 1) -> MultiPoly:
    """Parse a golden display, substituting the signature for ``sigma``."""
    gens = ("d", "E", "S", "T")
    p = MultiPoly.from_text(text, gens + ("sigma",)).subs({"sigma": sigma})
    out = MultiPoly.constant(0, gens)
    for exps, c in p.terms.items():
        mono = MultiPoly.constant(c, gens)
        for v, k in zip(gens, exps):
            mono = mono * MultiPoly.variable(v, gens) ** k
        out = out + mono
    return out


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    value: object = None
    expected: object = None
    tol: float | None = None


@dataclass
class TableResult:
    table_id: str
    description: str
    criterion: int | None
    checks: list = field(default_factory=list)
    outputs: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def check(self, name, passed, value=None, expected=None, tol=None):
        self.checks.append(Check(name, bool(passed), value, expected, tol))


def real_roots(p: MultiPoly, width=Fraction(1, 10 ** 30)) -> list:
    """Distinct real roots (mpf, 50 digits) of a univariate polynomial."""
    if p.is_constant():
        return []
    iso = isolate_real_roots(p)
    with mpmath.workdps(50):
        out = []
        for i in range(len(iso)):
            q = refine_root(iso, i, width)
            out.append(mpmath.mpf(q.numerator) / q.denominator)
        return out


def _close(values, expected, tol) -> tuple:
    """Sorted elementwise agreement; returns (ok, max deviation)."""
    values = sorted(float(v) for v in values)
    expected = sorted(float(e) for e in expected)
    if len(values) != len(expected):
        return False, float("inf")
    dev = max((abs(v - e) for v, e in zip(values, expected)), default=0.0)
    return dev <= tol, dev


def _same(p: MultiPoly, q: MultiPoly) -> bool:
    return p.primitive() == q.primitive()


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

def _symbolic_table(tid, N, text, terms=None):
    def run(res: TableResult):
        pair = eliminate(ModelSpec.symbolic(1, 1, N))
        got = pair.reduced
        res.outputs["polynomial"] = str(got.primitive())
        res.outputs["terms"] = len(got)
        res.check("equal to display up to sign and content", _same(got, golden_poly(text, 1)),
                  str(got.primitive()), str(golden_poly(text, 1).primitive()))
        if terms is not None:
            res.check("term count", len(got) == terms, len(got), terms)
        if N == 1:
            got_m = eliminate(ModelSpec.symbolic(-1, 1, 1)).reduced
            res.check("sigma = -1 display", _same(got_m, golden_poly(text, -1)),
                      str(got_m.primitive()), str(golden_poly(text, -1).primitive()))
        res.outputs["exceptional_factor"] = str(pair.exceptional_factor)
    return run


def _k0_stz(N):
    def run(res: TableResult):
        for sigma in (1, -1):
            pair = eliminate(ModelSpec(sigma, 0, N))
            res.check(f"display sigma={sigma:+d}", _same(pair.reduced, golden_poly(K0_STZ[N])),
                      str(pair.reduced), K0_STZ[N])
        pair = eliminate(ModelSpec(1, 0, N))
        nz = [r for r in real_roots(pair.eliminated) if r != 0]
        res.outputs["polynomial"] = str(pair.reduced)
        res.outputs["nonzero_real_energies"] = [float(r) for r in nz]
        exact = mpmath.cbrt(96 if N == 3 else 336)
        ok, dev = _close(nz, [exact], 1e-6)
        res.check("nonzero root of display", ok, [float(r) for r in nz], float(exact), 1e-6)
        prose = K0_N3_PROSE if N == 3 else K0_N4_PROSE
        res.outputs["prose_value"] = prose
        if N == 3:
            res.notes.append(NOTE_N3_PROSE)
        else:
            ok, dev = _close(nz, [prose], 5e-3)
            res.check("prose value", ok, [float(r) for r in nz], prose, 5e-3)
    return run


def _k0_n13(res: TableResult):
    spec = ModelSpec(1, 0, 13)
    states = solve_spectrum(spec)
    nz = [st.E for st in states if st.E != 0]
    res.outputs["nonzero_real_energies"] = [float(e) for e in nz]
    res.outputs["polynomial"] = str(eliminate(spec).reduced)
    ok, dev = _close(nz, K0_N13, 5e-3)
    res.check("nonzero quadruplet", ok, [float(e) for e in nz], list(K0_N13), 5e-3)


def _k1_stz(N):
    def run(res: TableResult):
        for sigma in (1, -1):
            pair = eliminate(ModelSpec(sigma, 1, N))
            want = golden_poly(K1_STZ[N], sigma)
            res.check(f"display sigma={sigma:+d}", _same(pair.reduced, want),
                      str(pair.reduced), str(want.primitive()))
        pair = eliminate(ModelSpec(1, 1, N))
        roots = real_roots(pair.eliminated)
        nz = [r for r in roots if r != 0]
        res.outputs["polynomial"] = str(pair.reduced)
        res.outputs["real_roots"] = [float(r) for r in roots]
        res.outputs["zero_root_multiplicity"] = _zero_mult(pair.reduced)
        if N == 2:
            ok, dev = _close(nz, [mpmath.cbrt(6)], 1e-6)
            res.check("nonzero root of display", ok, [float(r) for r in nz], float(mpmath.cbrt(6)), 1e-6)
            res.outputs["prose_value"] = K1_STZ_N2_PROSE
            res.notes.append(NOTE_N2_PROSE)
            res.check("double zero", _zero_mult(pair.reduced) == 2, _zero_mult(pair.reduced), 2)
        else:
            ok, dev = _close(nz, K1_STZ_ROOTS[N], 5e-3)
            res.check("nonzero roots", ok, [float(r) for r in nz], list(K1_STZ_ROOTS[N]), 5e-3)
            if N == 3:
                res.check("simple zero", _zero_mult(pair.reduced) == 1, _zero_mult(pair.reduced), 1)
    return run


def _zero_mult(p: MultiPoly) -> int:
    coeffs = p.to_univariate(next(iter(p.variables())))
    return next(k for k, c in enumerate(coeffs) if c)


def _k1_sample(res: TableResult):
    spec = ModelSpec(1, 1, 1, 3, 10)
    states = solve_spectrum(spec)
    ds = [float(st.d) for st in states]
    res.outputs["states"] = [(float(st.d), float(st.E)) for st in states]
    ok, dev = _close(ds, SAMPLE_TRIPLET, 1e-8)
    res.check("triplet", ok, ds, list(SAMPLE_TRIPLET), 1e-8)
    res.notes.append(NOTE_SIGMA_TRIPLET)


def _k2_quartic(res: TableResult):
    spec = ModelSpec(1, 2, 3)
    pair = eliminate(spec)
    q, gap, shift = sparsity_reduce(pair.reduced, "d", "x")
    want = MultiPoly.from_text(K2_N3_QUARTIC, ("x",))
    res.outputs["quartic"] = str(q)
    res.outputs["gap"], res.outputs["shift"] = gap, shift
    res.check("quartic in x = d^3", gap == 3 and shift == 0 and q.primitive() == want.primitive(),
              str(q), K2_N3_QUARTIC)
    res.check("constant term", q.primitive().to_univariate("x")[0] == 331776,
              q.primitive().to_univariate("x")[0], 331776)
    xs = real_roots(q)
    res.outputs["real_roots_x"] = [float(x) for x in xs]
    res.check("x1 = 24 exactly", any(x == K2_X1 for x in xs), [float(x) for x in xs], K2_X1)
    x2 = max(xs)
    ok, _ = _close([x2], [K2_X2], 1e-7)
    res.check("x2 printed value", ok, float(x2), K2_X2, 1e-7)
    with mpmath.workdps(50):
        c = mpmath.cbrt(9 + mpmath.sqrt(17))
        closed = 24 + 16 * c + 64 / c
        res.check("x2 closed form", abs(x2 - closed) <= 1e-8, float(x2), float(closed), 1e-8)
        ds = [mpmath.cbrt(x) for x in xs]
    ok, _ = _close(ds, K2_D_PLUS, 5e-3)
    res.check("charges d1, d2", ok, [float(d) for d in ds], list(K2_D_PLUS), 5e-3)
    states = solve_spectrum(spec, include_rejected=True)
    res.outputs["states"] = [{"d": float(st.d), "E": float(st.E), "residual": float(st.nullspace_residual),
                              "valid": st.valid} for st in states]
    res.notes.append(NOTE_X1)


def _k2_minus(res: TableResult):
    pair = eliminate(ModelSpec(-1, 2, 3))
    q, gap, shift = sparsity_reduce(pair.reduced, "d", "x")
    xs = real_roots(q)
    res.outputs["quartic"] = str(q)
    res.outputs["real_roots_x"] = [float(x) for x in xs]
    ok, _ = _close(xs, K2_X_MINUS, 5e-3)
    res.check("x quadruplet", ok, [float(x) for x in xs], list(K2_X_MINUS), 5e-3)
    ds = real_roots(pair.eliminated)
    ok, _ = _close(ds, K2_D_MINUS, 5e-3)
    res.check("d quadruplet", ok, [float(d) for d in ds], list(K2_D_MINUS), 5e-3)
    res.notes.append(NOTE_SIGMA_MINUS)


def _bb_map(count: int, J=None):
    def run(res: TableResult):
        rng = random.Random(20240611 + (J or 0))
        bad = 0
        for _ in range(count):
            a = Fraction(rng.randint(-50, 50), rng.randint(1, 12))
            c = Fraction(rng.randint(-50, 50), rng.randint(1, 12))
            j = J if J is not None else rng.randint(1, 12)
            got = linear_coupling(from_bender_boettcher(a, c, j))
            if got != a ** 3 - a * c - 2 * j:
                bad += 1
        res.outputs["samples"] = count
        res.check("exact identity", bad == 0, bad, 0)
    return run


def _structural(res: TableResult):
    # A_K = 0
    ok = all(recurrence_coeffs(K, ModelSpec(1, K, K))[0].is_zero() for K in range(9))
    res.check("A_K = 0 for K <= 8", ok)
    # exceptional root
    ok = True
    for N in range(1, 7):
        Q = secular_poly(ModelSpec.symbolic(1, 1, N))
        ok &= Q.subs({"d": _S, "E": _S * _S}).is_zero()
    res.check("Q(d=S, E=S^2) = 0 for K = 1, N <= 6", ok)
    # sigma flip
    rng = random.Random(7)
    worst, count_ok = 0.0, True
    for _ in range(50):
        S = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        T = Fraction(rng.randint(-9, 9), rng.randint(1, 4))
        for K in range(3):
            for N in range(max(K, 1) if K else 0, 6):
                r1 = real_roots(eliminate(ModelSpec(1, K, N, S, T)).eliminated, FLIP_WIDTH)
                r2 = real_roots(eliminate(ModelSpec(-1, K, N, -S, T)).eliminated, FLIP_WIDTH)
                if K > 0:
                    r2 = [-r for r in r2]
                if len(r1) != len(r2):
                    count_ok = False
                    continue
                for u, v in zip(sorted(r1), sorted(r2)):
                    worst = max(worst, float(abs(u - v)))
    res.outputs["sigma_flip_max_dev"] = worst
    res.check("sigma flip negates d-roots (E-roots fixed at K = 0)", count_ok and worst <= 1e-9,
              worst, 0.0, 1e-9)
    # sparsity
    gaps = {}
    ok = True
    for K in range(3):
        for N in range(K, 7):
            R = eliminate(ModelSpec(1, K, N)).reduced
            var = "E" if K == 0 else "d"
            q, gap, shift = sparsity_reduce(R, var, "u")
            gaps[f"K={K},N={N}"] = gap
            if len(R) == 1:
                # a monomial is v^shift * const(v^3) for every gap
                ok &= expand_sparsity(MultiPoly.constant(R.leading_coeff(), ("u",)), 3, shift, var) == R
            else:
                ok &= gap == 3
    res.outputs["gaps"] = gaps
    res.check("gap 3 at S = T = 0 for K <= 2, N <= 6", ok)


def _exactness(res: TableResult):
    worst, ranks_ok, sym_ok, n_states = 0.0, True, True, 0
    cases = [ModelSpec(1, 0, 0), ModelSpec(1, 1, 1, 3, 10), ModelSpec(-1, 1, 1, 3, 10)]
    cases += [ModelSpec(s, K, N) for s in (1, -1) for K in range(3) for N in range(K, 5)]
    cases += [ModelSpec(1, 1, 2, Fraction(1, 2), Fraction(-1))]
    for spec in cases:
        for st in solve_spectrum(spec):
            n_states += 1
            if st.is_exact:
                sym_ok &= st.symbolic_residual_zero is True
            else:
                worst = max(worst, float(st.nullspace_residual))
            ranks_ok &= st.rank == spec.N
    zero = solve_spectrum(ModelSpec(1, 0, 0))
    res.outputs["states_checked"] = n_states
    res.outputs["max_floating_residual"] = worst
    res.check("floating residual", worst <= RESIDUAL_TOL, worst, RESIDUAL_TOL)
    res.check("exact states have zero symbolic residual", sym_ok)
    res.check("rank N at every state", ranks_ok)
    res.check("K = N = 0 state E = 0", len(zero) == 1 and zero[0].E == 0 and zero[0].is_exact
              and zero[0].symbolic_residual_zero is True)


def _equivalence(res: TableResult):
    ok = True
    for K in (1, 2):
        for N in range(K, 5):
            for spec in (ModelSpec.symbolic(1, K, N), ModelSpec.symbolic(-1, K, N)):
                a = eliminate(spec).reduced
                b = substitution_route(spec)
                same = _same(a, b)
                res.outputs[f"K={K},N={N},sigma={spec.sigma:+d}"] = same
                ok &= same
    res.check("resultant route equals substitution route", ok)


def _oracle_levels(N):
    def run(res: TableResult):
        from .oracle import GridConfig, fd_spectrum, match_levels
        spec = ModelSpec(1, 0, N)
        states = solve_spectrum(spec)
        levels = [float(st.E) for st in states]
        if any(st.multiplicity > 1 for st in states):
            res.notes.append(NOTE_DOUBLE_LEVEL)
        grid = GridConfig(8.0, 2000, 1.0)
        ev = fd_spectrum(spec, Contour.straight(grid.epsilon, 1), grid)
        rep = match_levels(levels, ev, 1e-3)
        res.outputs["match"] = rep.to_dict()
        res.check("unmatched quasi-exact levels", rep.passed, rep.to_dict()["unmatched"], [], 1e-3)
    return run


def _oracle_convergence(res: TableResult):
    from .oracle import GridConfig, convergence_ratio
    spec = ModelSpec(1, 0, 3)
    level = float(mpmath.cbrt(96))
    e1, e2, ratio = convergence_ratio(spec, Contour.straight(1.0, 1), level, GridConfig(8.0, 501, 1.0))
    res.outputs.update({"err_h": float(e1), "err_h_over_2": float(e2), "ratio": float(ratio)})
    res.check("second-order ratio", bool(3.5 <= ratio <= 4.5), float(ratio), [3.5, 4.5])


TABLES = {
    "k1-n1-cubic": ("K=1, N=1 symbolic cubic", 1, _symbolic_table("k1-n1-cubic", 1, K1_N1_CUBIC)),
    "k1-n2-quintic": ("K=1, N=2 symbolic quintic, 16 terms", 1,
                      _symbolic_table("k1-n2-quintic", 2, K1_N2_QUINTIC, 16)),
    "k1-n3-septic": ("K=1, N=3 symbolic septic, 31 terms", 1,
                     _symbolic_table("k1-n3-septic", 3, K1_N3_SEPTIC, 31)),
    "k0-stz-n3": ("K=0, S=T=0, N=3 energy polynomial", 1, _k0_stz(3)),
    "k0-stz-n4": ("K=0, S=T=0, N=4 energy polynomial", 1, _k0_stz(4)),
    "k1-stz-n1": ("K=1, S=T=0, N=1 charge polynomial", 1, _k1_stz(1)),
    "k1-stz-n2": ("K=1, S=T=0, N=2 charge polynomial", 1, _k1_stz(2)),
    "k1-stz-n3": ("K=1, S=T=0, N=3 charge polynomial", 1, _k1_stz(3)),
    "k1-stz-n4": ("K=1, S=T=0, N=4 charge polynomial", 1, _k1_stz(4)),
    "k2-n3-quartic": ("K=2, N=3, sigma=+1 quartic in x = d^3", 1, _k2_quartic),
    "k1-sample-triplet": ("K=1, N=1 charges at (S, T) = (3, 10)", 2, _k1_sample),
    "k2-n3-sigma-minus": ("K=2, N=3, sigma=-1 real roots", 2, _k2_minus),
    "k0-stz-n13": ("K=0, S=T=0, N=13 nonzero energies", 2, _k0_n13),
    "structural": ("A_K = 0, exceptional root, sigma flip, sparsity", 3, _structural),
    "exactness": ("null-vector residuals and ranks", 4, _exactness),
    "elimination-equivalence": ("resultant versus substitution", 5, _equivalence),
    "bb-map": ("linear coupling under the three-parameter map", 6, _bb_map(100)),
    "bb-cubic-n1": ("linear coupling under the map at J = 2", 6, _bb_map(25, 2)),
    "oracle-k0-n3": ("finite differences, K=0, S=T=0, N=3", 7, _oracle_levels(3)),
    "oracle-k0-n4": ("finite differences, K=0, S=T=0, N=4", 7, _oracle_levels(4)),
    "oracle-convergence": ("second-order convergence, K=0, N=3", 7, _oracle_convergence),
}


# tables whose checks make up each acceptance criterion; a table can serve
# two criteria (the K=1 charge tables carry both the displays and the roots)
CRITERIA = {
    1: ["k1-n1-cubic", "k1-n2-quintic", "k1-n3-septic", "k0-stz-n3", "k0-stz-n4",
        "k1-stz-n1", "k1-stz-n2", "k1-stz-n3", "k1-stz-n4", "k2-n3-quartic"],
    2: ["k1-sample-triplet", "k2-n3-quartic", "k2-n3-sigma-minus", "k0-stz-n13",
        "k1-stz-n1", "k1-stz-n2", "k1-stz-n3", "k1-stz-n4", "k0-stz-n3"],
    3: ["structural"],
    4: ["exactness"],
    5: ["elimination-equivalence"],
    6: ["bb-map", "bb-cubic-n1"],
    7: ["oracle-k0-n3", "oracle-k0-n4", "oracle-convergence"],
}
RUNTIME_LIMITS = {1: ("total", 10.0), 7: ("each", 60.0)}


def list_tables() -> list:
    return list(TABLES)


def run_table(table_id: str) -> TableResult:
    desc, crit, fn = TABLES[table_id]
    res = TableResult(table_id, desc, crit)
    t0 = time.perf_counter()
    fn(res)
    res.seconds = time.perf_counter() - t0
    return res
