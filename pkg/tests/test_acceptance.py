"""One test per acceptance criterion, each at its stated tolerance.

Every criterion is the conjunction of the checks in the reproduction tables
listed for it in ``CRITERIA``. A one-line verdict per criterion is printed in
the terminal summary whether it passes or not.
"""
import pytest

from qesquartic.reproduce import CRITERIA, RUNTIME_LIMITS, run_table

_CACHE = {}


def _table(tid):
    if tid not in _CACHE:
        _CACHE[tid] = run_table(tid)
    return _CACHE[tid]


def _failures(crit):
    out = []
    results = [_table(t) for t in CRITERIA[crit]]
    for r in results:
        out += [f"{r.table_id}: {c.name} (got {c.value}, expected {c.expected})"
                for c in r.checks if not c.passed]
    if crit in RUNTIME_LIMITS:
        mode, limit = RUNTIME_LIMITS[crit]
        times = [r.seconds for r in results]
        if mode == "total" and sum(times) >= limit:
            out.append(f"runtime {sum(times):.1f} s exceeds {limit:.0f} s")
        if mode == "each":
            out += [f"{r.table_id}: runtime {r.seconds:.1f} s exceeds {limit:.0f} s"
                    for r in results if r.seconds >= limit]
    return out


@pytest.mark.parametrize("crit", sorted(CRITERIA))
def test_criterion(crit, acceptance_log):
    failures = _failures(crit)
    seconds = sum(_table(t).seconds for t in CRITERIA[crit])
    verdict = "PASS" if not failures else "FAIL"
    line = f"criterion {crit}: {verdict} ({len(CRITERIA[crit])} tables, {seconds:.1f} s)"
    if failures:
        line += "; " + "; ".join(failures)
    acceptance_log.append(line)
    print(line)
    assert not failures, line
