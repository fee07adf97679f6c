"""Shared test plumbing: the acceptance suite records one line per criterion
and the lines are printed in the terminal summary."""

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: str, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"criterion {number:>3}: {status}  {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
