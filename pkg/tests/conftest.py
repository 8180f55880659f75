"""Prints one PASS/FAIL line per acceptance criterion after the run,
so the verdicts are visible even when pytest captures test stdout."""

import re


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = []
    for outcome, label in (("passed", "PASS"), ("failed", "FAIL")):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") != "call":
                continue
            m = re.search(r"test_criterion_(\d+)", rep.nodeid)
            if m:
                rows.append((int(m.group(1)), label))
    if rows:
        terminalreporter.write_line("acceptance criteria:")
        for num, label in sorted(rows):
            terminalreporter.write_line(f"  criterion {num}: {label}")
