import warnings

warnings.filterwarnings("ignore", message=".*TBB.*")

# filled by test_acceptance.py: criterion number -> (title, passed, detail)
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
