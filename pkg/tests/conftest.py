import os
import sys

sys.path.insert(0, os.path.dirname(__file__))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        terminalreporter.write_line(results[num])
    missing = sorted(set(range(1, 12)) - set(results))
    if missing:
        terminalreporter.write_line(f"not run: {', '.join(map(str, missing))}")
