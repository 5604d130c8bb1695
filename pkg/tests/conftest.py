import re

CRITERION_PATTERN = re.compile(r"test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = {}
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance" not in report.nodeid:
                continue
            match = CRITERION_PATTERN.search(report.nodeid)
            if not match:
                continue
            num, slug = int(match.group(1)), match.group(2)
            verdict = "PASS" if outcome == "passed" else "FAIL"
            key = (num, slug)
            if lines.get(key) != "FAIL":
                lines[key] = verdict
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for (num, slug), verdict in sorted(lines.items()):
            terminalreporter.write_line(f"criterion {num:02d} {slug.replace('_', '-')}: {verdict}")
