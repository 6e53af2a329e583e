import pytest

from mertens_lab.streaming import snapshots

DESK_XS = [10**3, 10**4, 10**5, 10**6, 10**7, 10**8]

# filled by test_acceptance.py, printed once at the end of the session
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def desk():
    """Snapshots at 1e3 ... 1e8 from one streaming pass."""
    return dict(zip(DESK_XS, snapshots(DESK_XS)))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
