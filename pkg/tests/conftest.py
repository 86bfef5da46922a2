import pytest

from dpnalign.solver import SolverNotFound, solver_command


def _have_solver() -> bool:
    try:
        solver_command()
    except SolverNotFound:
        return False
    return True


HAVE_SOLVER = _have_solver()


def pytest_collection_modifyitems(config, items):
    skip = pytest.mark.skip(reason="no SMT solver on PATH (install z3 or set DPNALIGN_SOLVER)")
    for item in items:
        if "solver" in item.keywords and not HAVE_SOLVER:
            item.add_marker(skip)


# --- acceptance criteria summary ---------------------------------------------

_criteria: dict = {}


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    number, title = crit
    entry = _criteria.setdefault(number, {"title": title, "outcomes": []})
    if report.when == "call" or report.outcome != "passed":
        entry["outcomes"].append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        outs = entry["outcomes"]
        if any(o == "failed" for o in outs):
            verdict = "FAIL"
        elif outs and all(o == "skipped" for o in outs):
            verdict = "SKIP"
        else:
            verdict = "PASS"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {entry['title']}")
