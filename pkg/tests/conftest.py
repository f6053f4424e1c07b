import pytest

ACCEPTANCE = {}


def record(number, title, ok, detail=""):
    ACCEPTANCE[number] = (title, ok, detail)


@pytest.fixture
def criterion(capsys):
    def report(number, title, ok, detail=""):
        record(number, title, ok, detail)
        with capsys.disabled():
            print(f"\ncriterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}")
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  ({detail})")
