import pytest

# criterion number -> list of (part, ok, detail); filled by test_acceptance
ACCEPTANCE: dict = {}


@pytest.fixture
def record():
    def _record(number: int, part: str, ok: bool, detail: str):
        ACCEPTANCE.setdefault(number, []).append((part, bool(ok), detail))
        line = f"criterion {number} [{part}]: {'PASS' if ok else 'FAIL'} {detail}"
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[number]
        ok = all(p[1] for p in parts)
        detail = "; ".join(f"{name}: {'ok' if good else 'FAIL'} ({d})" for name, good, d in parts)
        tr.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
