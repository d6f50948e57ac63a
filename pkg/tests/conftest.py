"""Terminal summary hook: one verdict line per shipping acceptance criterion."""

from __future__ import annotations

CRITERIA = {
    1: "worked example: mergeable, zero-closed positions, restriction, core",
    2: "mergeability vector for ODD3, (x=y)->z, EVEN3, OR2",
    3: "classifier trichotomy with a replayable witness",
    4: "random tuple families always contain a valid sunflower",
    5: "kernel decision, size bound, and shrinking measure on random instances",
    6: "kernel growth exponent at most 3.2 on adversarial families",
    7: "selection tree weights and unit solutions",
    8: "hitting set reduction decisions match exhaustive search",
    9: "branching solver agrees with brute force",
    10: "property flags and clause implementations on all small relations",
}

_results: dict[int, bool] = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if name.startswith("test_criterion_"):
        number = int(name.split("_")[2])
        _results[number] = report.passed


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(CRITERIA):
        if number not in _results:
            continue
        verdict = "PASS" if _results[number] else "FAIL"
        terminalreporter.write_line(f"[{verdict}] criterion {number}: {CRITERIA[number]}")
