import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# criterion number -> [title, outcome]; a criterion fails if any of its tests fails
_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when != "call" and not (rep.failed or rep.skipped):
        return
    num, title = marker.args
    state = "PASS" if rep.passed else "FAIL" if rep.failed else "SKIP"
    entry = _CRITERIA.setdefault(num, [title, "PASS"])
    if entry[1] == "PASS":
        entry[1] = state


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, state = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:>2}: {state}  {title}")
