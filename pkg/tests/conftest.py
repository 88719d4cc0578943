"""Shared test plumbing: surface the acceptance criterion lines in the
terminal summary (capture would otherwise swallow them on passing runs)."""

CRITERION_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
