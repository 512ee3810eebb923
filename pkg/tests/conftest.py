import time

import pytest

# acceptance bookkeeping: one summary line per criterion, printed in the
# terminal summary so it is never swallowed by output capture
_ACCEPTANCE: dict[str, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when != "call":
        return
    entry = _ACCEPTANCE.get(item.nodeid)
    if entry is not None:
        entry["outcome"] = rep.outcome
        entry["duration"] = rep.duration


@pytest.fixture
def criterion(request):
    """Register the running test as one acceptance criterion."""
    info = {"outcome": "error", "duration": 0.0, "label": "", "number": 0, "t0": time.time()}
    _ACCEPTANCE[request.node.nodeid] = info

    def describe(number: int, label: str, limit_s: float):
        info["number"] = number
        info["label"] = label
        info["limit_s"] = limit_s
        return info

    return describe


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for info in sorted(_ACCEPTANCE.values(), key=lambda d: d["number"]):
        status = "PASS" if info["outcome"] == "passed" else "FAIL"
        limit = info.get("limit_s")
        limit_txt = f" (limit {limit:.0f}s)" if limit else ""
        terminalreporter.write_line(
            f"[criterion {info['number']:2d}] {status}  {info['label']}"
            f" - {info['duration']:.1f}s{limit_txt}"
        )
