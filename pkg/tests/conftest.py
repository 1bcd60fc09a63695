import pytest

_RESULTS = pytest.StashKey[dict]()
_TITLES = {
    1: "algebra suite",
    2: "desired-chain consistency",
    3: "rotation error bound",
    4: "Hurwitz gate",
    5: "flip convergence",
    6: "rhodonea tracking",
    7: "disturbance realism",
    8: "plant integrator",
    9: "determinism",
    10: "rotation benchmark",
}


def pytest_configure(config):
    config.stash[_RESULTS] = {}


@pytest.fixture
def acceptance(request):
    """``record(n, ok, detail)`` stores one criterion's verdict for the summary."""
    results = request.config.stash[_RESULTS]

    def record(n: int, ok: bool, detail: str) -> bool:
        results[n] = (bool(ok), detail)
        line = f"[{'PASS' if ok else 'FAIL'}] {n:>2}. {_TITLES[n]}: {detail}"
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, {})
    ran = any("test_acceptance" in str(item) for item in terminalreporter.stats.get("passed", []) +
              terminalreporter.stats.get("failed", []))
    if not results and not ran:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in _TITLES.items():
        ok, detail = results.get(n, (False, "not recorded"))
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:>2}. {title}: {detail}")
