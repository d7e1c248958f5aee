"""Prints one pass/fail line per acceptance criterion after the run."""

CRITERIA = []   # (number, text, test function name)
RESULTS = {}    # number -> (passed, text)


def register_criterion(n, text, fname):
    CRITERIA.append((n, text, fname))


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    name = report.nodeid.split("::")[-1]
    for n, text, fname in CRITERIA:
        if fname == name:
            RESULTS[n] = (report.passed, text)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not RESULTS:
        return
    terminalreporter.ensure_newline()
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, text = RESULTS[n]
        terminalreporter.write_line(
            "%s criterion %2d: %s" % ("PASS" if ok else "FAIL", n, text))
