"""Shared pytest wiring: one-line verdict per acceptance criterion."""

import re

CRITERIA = {
    1: "trigger-selection fixpoint matches naive oracle",
    2: "top-k scans match exhaustive oracles",
    3: "axiom vectors match independent formula evaluation",
    4: "idf log base does not affect selection",
    5: "superset, monotonicity and union laws",
    6: "name normalization and source priorities",
    7: "reference corpus spot values",
    8: "word-association study reproduction",
    9: "prover harness classification and timeout",
}

_RANK = {"FAIL": 2, "SKIP": 1, "PASS": 0}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts = {}
    for status, label in (("failed", "FAIL"), ("error", "FAIL"), ("skipped", "SKIP"), ("passed", "PASS")):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            match = re.search(r"test_c(\d+)", nodeid)
            if not match:
                continue
            num = int(match.group(1))
            if num not in verdicts or _RANK[label] > _RANK[verdicts[num]]:
                verdicts[num] = label
    if not verdicts:
        return
    terminalreporter.write_sep("-", "acceptance summary")
    for num in sorted(verdicts):
        label = CRITERIA.get(num, "criterion")
        terminalreporter.write_line(f"acceptance criterion {num}: {label}: {verdicts[num]}")
