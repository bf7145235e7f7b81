import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one line per acceptance criterion at the end of the run."""
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    log = getattr(module, "ACCEPTANCE_LOG", None)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, name, passed, detail in log:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {criterion} ({name}): {detail}")
