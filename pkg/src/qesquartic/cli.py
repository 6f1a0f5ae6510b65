"""Command-line front end: derive, solve, verify, oracle, reproduce."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import DegenerateSpec, InvalidInput, UnsupportedError
from .model import Contour, ModelSpec, format_rational, parse_rational
from .polyalg import MultiPoly
from .secular import eliminate
from .spectrum import RESIDUAL_TOL, null_vector, numeric_rank, solve_spectrum

SCHEMA = 1
DEFAULT_DIGITS = 12
DEFAULT_TOL = 1e-9
ORACLE_TOL = 1e-3
FORMATS = ("json", "csv", "text")


class UsageError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    status: str = "pass"
    notes: list = field(default_factory=list)
    digits: int = DEFAULT_DIGITS


# ---------------------------------------------------------------------------
# Serialisation
# ---------------------------------------------------------------------------

def round_float(x, digits: int) -> float:
    return float(f"{float(x):.{digits}g}")


def _plain(obj, digits: int):
    """JSON-ready copy: rationals as "p/q", floats at ``digits`` significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, MultiPoly):
        return obj.to_text()
    if isinstance(obj, complex) or isinstance(obj, mpmath.mpc):
        return [round_float(obj.real, digits), round_float(obj.imag, digits)]
    if isinstance(obj, dict):
        return {str(k): _plain(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v, digits) for v in obj]
    try:
        x = float(obj)
    except (TypeError, ValueError):
        return str(obj)
    if x != x or x in (float("inf"), float("-inf")):
        return str(x)
    return round_float(x, digits)


def report_dict(report: RunReport) -> dict:
    return {
        "schema": SCHEMA,
        "command": report.command,
        "status": report.status,
        "inputs": _plain(report.inputs, report.digits),
        "outputs": _plain(report.outputs, report.digits),
        "notes": list(report.notes),
    }


def emit_report(report: RunReport, fmt: str = "json") -> bytes:
    if fmt not in FORMATS:
        raise UsageError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
    data = report_dict(report)
    if fmt == "json":
        return (json.dumps(data, indent=2) + "\n").encode()
    if fmt == "csv":
        return _emit_csv(data).encode()
    return _emit_text(data).encode()


def _emit_csv(data: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    out = data["outputs"]
    if data["command"] == "solve":
        w.writerow(["d", "E"])
        for st in out.get("states", []):
            w.writerow([st["d"], st["E"]])
    elif data["command"] == "reproduce":
        w.writerow(["table", "status"])
        for t in out.get("tables", []):
            w.writerow([t["id"], t["status"]])
    else:
        w.writerow(["key", "value"])
        for k, v in out.items():
            w.writerow([k, json.dumps(v) if isinstance(v, (dict, list)) else v])
    return buf.getvalue()


def _emit_text(data: dict) -> str:
    lines = []
    out = data["outputs"]
    cmd = data["command"]
    head = " ".join(f"{k}={v}" for k, v in data["inputs"].items())
    lines.append(f"# {cmd} {head}".rstrip())
    if cmd == "derive":
        for key in ("constraint", "secular", "resultant", "eliminant", "eliminant_terms",
                    "exceptional_factor"):
            if out.get(key) is not None:
                lines.append(f"{key}: {out[key]}")
        lines.append(f"variable: {out['variable']}")
    elif cmd == "solve":
        for st in out["states"]:
            flags = ",".join(st["flags"])
            lines.append(f"d={st['d']} E={st['E']} mult={st['multiplicity']}"
                         + (f" flags={flags}" if flags else ""))
    elif cmd == "reproduce":
        for t in out.get("tables", []):
            lines.append(f"{t['id']}: {t['status']}")
            for c in t["checks"]:
                if not c["passed"]:
                    lines.append(f"  FAIL {c['name']}: got {c['value']} expected {c['expected']}")
            for n in t["notes"]:
                lines.append(f"  note: {n}")
        if "available" in out:
            lines.extend(out["available"])
    else:
        for k, v in out.items():
            lines.append(f"{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}")
    lines.extend(f"note: {n}" for n in data["notes"])
    lines.append(f"status: {data['status']}")
    return "\n".join(lines) + "\n"


def parse_report(blob) -> RunReport:
    """Inverse of the JSON emitter (floats come back exactly as written)."""
    data = json.loads(blob)
    if data.get("schema") != SCHEMA:
        raise UsageError(f"unsupported report schema {data.get('schema')!r}")
    return RunReport(data["command"], data["inputs"], data["outputs"], data["status"], data["notes"])


def states_from_report(report: RunReport) -> list:
    """[(d, E)] of a solve report; exact values come back as Fractions."""
    def value(v):
        return Fraction(v) if isinstance(v, str) else v
    return [(value(st["d"]), value(st["E"])) for st in report.outputs.get("states", [])]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _sigma(text: str) -> int:
    try:
        s = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"sigma must be +1 or -1, got {text!r}")
    if s not in (1, -1):
        raise argparse.ArgumentTypeError(f"sigma must be +1 or -1, got {text!r}")
    return s


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return v


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except InvalidInput as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _model_args(p: argparse.ArgumentParser, symbolic: bool = False):
    p.add_argument("--K", type=_nonneg, required=True)
    p.add_argument("--N", type=_nonneg, required=True)
    p.add_argument("--S", type=_rational, default=Fraction(0))
    p.add_argument("--T", type=_rational, default=Fraction(0))
    p.add_argument("--sigma", type=_sigma, default=1)
    if symbolic:
        p.add_argument("--symbolic", action="store_true", help="keep S and T as indeterminates")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--digits", type=int, default=DEFAULT_DIGITS)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--format", default="json")


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let "--T -1/2" and "--E -1e-3" through as values, not options
        self._negative_number_matcher = re.compile(r"^-(\d+(/\d+)?|\d*\.?\d+([eE][-+]?\d+)?)$")

    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qes", description="Quasi-exact multiplets of the complexified quartic oscillator")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    p = sub.add_parser("derive", help="constraint, secular and eliminated polynomials")
    _model_args(p, symbolic=True)
    _common(p)
    p = sub.add_parser("solve", help="all real quasi-exact states")
    _model_args(p)
    _common(p)
    p = sub.add_parser("verify", help="null-vector residual at a supplied (d, E)")
    _model_args(p)
    p.add_argument("--d", required=True)
    p.add_argument("--E", required=True)
    _common(p)
    p = sub.add_parser("oracle", help="finite-difference comparison on a straight contour")
    _model_args(p)
    p.add_argument("--t-max", type=float, default=8.0)
    p.add_argument("--points", type=int, default=2000)
    p.add_argument("--epsilon", type=float, default=1.0)
    _common(p)
    p = sub.add_parser("reproduce", help="regenerate a named table and diff against golden values")
    p.add_argument("table", nargs="?")
    p.add_argument("--list", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    _common(p)
    return parser


def _spec(ns, allow_symbolic=False) -> ModelSpec:
    if allow_symbolic and getattr(ns, "symbolic", False):
        return ModelSpec.symbolic(ns.sigma, ns.K, ns.N)
    return ModelSpec(ns.sigma, ns.K, ns.N, ns.S, ns.T)


def _precision(digits: int) -> Fraction:
    return Fraction(1, 10 ** (digits + 2))


def _number(text: str):
    """Exact rational for "p/q" or integers, 50-digit float for decimals."""
    s = text.strip()
    if any(ch in s for ch in ".eE"):
        with mpmath.workdps(50):
            try:
                return mpmath.mpf(s)
            except ValueError as exc:
                raise InvalidInput(f"malformed number {text!r}") from exc
    return parse_rational(s)


def cmd_derive(ns, report: RunReport):
    spec = _spec(ns, allow_symbolic=True)
    pair = eliminate(spec)
    report.inputs = dict(spec.to_config(), mode="symbolic" if spec.is_symbolic else "numeric")
    report.outputs = {
        "constraint": pair.constraint,
        "secular": pair.secular,
        "resultant": pair.resultant,
        "eliminant": pair.reduced,
        "eliminant_terms": len(pair.reduced),
        "exceptional_factor": pair.exceptional_factor,
        "variable": pair.elimination_var,
    }


def _state_dict(st) -> dict:
    return {
        "d": st.d.exact if st.d.exact is not None else float(st.d),
        "E": st.E if isinstance(st.E, Fraction) else float(st.E),
        "charge": {"defining_poly": st.d.defining_poly, "interval": list(st.d.interval)},
        "multiplicity": st.multiplicity,
        "flags": sorted(st.flags),
        "h": [x if isinstance(x, Fraction) else float(x) for x in st.h],
        "residual": float(st.nullspace_residual),
        "rank": st.rank,
    }


def cmd_solve(ns, report: RunReport):
    spec = _spec(ns)
    report.inputs = spec.to_config()
    states = solve_spectrum(spec, _precision(ns.digits), ns.tol or DEFAULT_TOL)
    report.outputs = {"count": len(states), "states": [_state_dict(st) for st in states]}


def cmd_verify(ns, report: RunReport):
    spec = _spec(ns)
    d, E = _number(ns.d), _number(ns.E)
    tol = ns.tol or DEFAULT_TOL
    report.inputs = dict(spec.to_config(), d=ns.d, E=ns.E)
    h, res = null_vector(spec, d, E)
    rank, sv = numeric_rank(spec, d, E, rel_tol=tol)
    exact = isinstance(d, Fraction) and isinstance(E, Fraction) and all(isinstance(x, Fraction) for x in h)
    ok = res == 0 if exact else res <= max(tol, RESIDUAL_TOL)
    report.outputs = {
        "residual": float(res),
        "exact": exact,
        "rank": rank,
        "smallest_singular_value": sv[-1],
        "h": [x if isinstance(x, Fraction) else float(x) for x in h],
    }
    report.status = "pass" if ok and rank == spec.N else "fail"


def cmd_oracle(ns, report: RunReport):
    from .oracle import GridConfig, fd_spectrum, match_levels

    spec = _spec(ns)
    grid = GridConfig(ns.t_max, ns.points, ns.epsilon)
    tol = ns.tol or ORACLE_TOL
    report.inputs = dict(spec.to_config(), t_max=grid.t_max, points=grid.points, epsilon=grid.epsilon)
    contour = Contour.straight(grid.epsilon, spec.sigma)
    # the operator depends on the charge, so levels are compared per distinct d
    by_charge: dict = {}
    for st in solve_spectrum(spec):
        by_charge.setdefault(round_float(st.d, 15), []).append(float(st.E))
    matched, unmatched, worst = [], [], 0.0
    for d, levels in sorted(by_charge.items()):
        rep = match_levels(levels, fd_spectrum(spec, contour, grid, d=d), tol).to_dict()
        for m in rep["matched"]:
            matched.append(dict(d=d, **m))
        unmatched.extend({"d": d, "E": e} for e in rep["unmatched"])
        worst = max(worst, rep["max_rel_err"])
    report.outputs = {
        "grid": {"t_max": grid.t_max, "points": grid.points, "epsilon": grid.epsilon},
        "matched": matched,
        "unmatched": unmatched,
        "max_rel_err": worst,
    }
    report.status = "pass" if not unmatched else "fail"


def _table_payload(res) -> dict:
    return {
        "id": res.table_id,
        "description": res.description,
        "criterion": res.criterion,
        "status": res.status,
        "checks": [{"name": c.name, "passed": c.passed, "value": c.value,
                    "expected": c.expected, "tol": c.tol} for c in res.checks],
        "outputs": res.outputs,
        "notes": res.notes,
    }


def _run_one(table_id: str) -> dict:
    from .reproduce import run_table
    return _table_payload(run_table(table_id))


def cmd_reproduce(ns, report: RunReport):
    from .reproduce import list_tables

    tables = list_tables()
    if ns.list:
        report.outputs = {"available": tables}
        return
    if not ns.table:
        raise UsageError("reproduce needs a table id, 'all', or --list")
    if ns.table == "all":
        wanted = tables
    elif ns.table in tables:
        wanted = [ns.table]
    else:
        raise UsageError(f"unknown table id {ns.table!r}; see 'reproduce --list'")
    report.inputs = {"table": ns.table}
    if ns.jobs > 1 and len(wanted) > 1:
        with ProcessPoolExecutor(max_workers=ns.jobs) as pool:
            results = list(pool.map(_run_one, wanted))
    else:
        results = [_run_one(t) for t in wanted]
    report.outputs = {"tables": results}
    if ns.table == "all":
        from .reproduce import CRITERIA
        by_id = {r["id"]: r["status"] for r in results}
        report.outputs["criteria"] = {
            str(k): "pass" if all(by_id[t] == "pass" for t in ids) else "fail"
            for k, ids in CRITERIA.items()}
    passed = sum(r["status"] == "pass" for r in results)
    if passed == len(results):
        report.status = "pass"
    elif passed == 0:
        report.status = "fail"
    else:
        report.status = "partial"


COMMANDS = {
    "derive": cmd_derive,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
    "reproduce": cmd_reproduce,
}


def run_command(argv) -> tuple:
    """Execute one command; returns (exit code, RunReport, format)."""
    parser = build_parser()
    try:
        ns = parser.parse_args(list(argv))
        if ns.command is None:
            raise UsageError("expected one of: " + ", ".join(COMMANDS))
        env = os.environ.get("QES_PRECISION")
        if env:
            try:
                ns.digits = int(env)
            except ValueError:
                raise UsageError(f"QES_PRECISION must be an integer, got {env!r}")
        if not 1 <= ns.digits <= 40:
            raise UsageError("--digits must lie in 1..40")
        if ns.format not in FORMATS:
            raise UsageError(f"unknown format {ns.format!r}; choose from {', '.join(FORMATS)}")
        report = RunReport(ns.command, digits=ns.digits)
        COMMANDS[ns.command](ns, report)
    except (UsageError, InvalidInput, UnsupportedError) as exc:
        report = RunReport(argv[0] if argv else "", status="error", notes=[str(exc)])
        return 2, report, "json"
    except DegenerateSpec as exc:
        report = RunReport(ns.command, status="error", notes=[str(exc)])
        return 1, report, ns.format
    code = 0 if report.status == "pass" else 1
    return code, report, ns.format


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, report, fmt = run_command(argv)
    if code == 2:
        sys.stderr.write(f"qes: error: {report.notes[0]}\n")
    else:
        sys.stdout.buffer.write(emit_report(report, fmt))
        sys.stdout.flush()
    return code


if __name__ == "__main__":
    raise SystemExit(main())
