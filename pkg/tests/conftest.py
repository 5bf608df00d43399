import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

from helpers import CRITERIA  # noqa: E402


def pytest_collection_modifyitems(config, items):
    # acceptance runs last so the soundness sweep sees every produced proof
    items.sort(key=lambda it: "test_acceptance" in it.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        ok, detail = CRITERIA[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")
