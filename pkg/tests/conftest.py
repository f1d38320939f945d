import time


def pytest_configure(config):
    config._suite_started = time.monotonic()


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.monotonic() - session.config._suite_started
    session.config._suite_elapsed = elapsed
    # Criterion 10 gate: the whole suite must finish inside its wall budget.
    if elapsed >= 90.0 and exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    elapsed = time.monotonic() - config._suite_started
    try:
        from test_acceptance import RESULTS
    except ImportError:
        RESULTS = []
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)
    verdict = "PASS" if elapsed < 90.0 else "FAIL"
    terminalreporter.write_line(
        f"[criterion 10] {verdict} whole-suite wall time: {elapsed:.1f}s (bound 90s), exact arithmetic"
    )
