import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE, key=lambda k: (int(k[0]), k)):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
