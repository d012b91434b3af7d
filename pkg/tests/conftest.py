from __future__ import annotations

import re
import sys
from pathlib import Path

from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", derandomize=True)
settings.load_profile("default")

_CRITERION = re.compile(r"test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of every run."""
    lines: dict[int, str] = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            if "test_acceptance" not in report.nodeid:
                continue
            match = _CRITERION.search(report.nodeid)
            if not match:
                continue
            number = int(match.group(1))
            verdict = "PASS" if status == "passed" else "FAIL"
            name = report.nodeid.split("::")[-1]
            lines[number] = f"criterion {number}: {verdict}  ({name})"
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
