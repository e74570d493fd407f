import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance verdicts: criterion id -> list of (check, passed, detail)
_VERDICTS = {}


@pytest.fixture
def verdict():
    """Record and print one acceptance check; the test still asserts on its own."""

    def record(criterion, check, passed, detail):
        _VERDICTS.setdefault(criterion, []).append((check, bool(passed), detail))
        print(f"AC{criterion} {check}: {'PASS' if passed else 'FAIL'} ({detail})")
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(_VERDICTS):
        checks = _VERDICTS[crit]
        ok = all(p for _, p, _ in checks)
        failed = [c for c, p, _ in checks if not p]
        tail = f"{len(checks)} checks" if ok else "failed: " + ", ".join(failed)
        tr.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'} ({tail})")
        for check, p, detail in checks:
            tr.write_line(f"    {'PASS' if p else 'FAIL'} {check}: {detail}")
