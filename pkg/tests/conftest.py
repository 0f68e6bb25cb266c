import pytest

from rulesched.model import Instance, Nurse, ShiftPattern, make_cover


def make_tiny() -> Instance:
    """Three day-workers, two grades, three two-day patterns."""
    patterns = (
        ShiftPattern(1, make_cover(days=(1, 2))),
        ShiftPattern(2, make_cover(days=(1, 3))),
        ShiftPattern(3, make_cover(days=(2, 3))),
    )
    nurses = (
        Nurse(1, grade=1, days=2, pref_cost=(0.0, 10.0, 20.0)),
        Nurse(2, grade=2, days=2, pref_cost=(10.0, 0.0, 20.0)),
        Nurse(3, grade=2, days=2, pref_cost=(20.0, 10.0, 0.0)),
    )
    demand = [(1, 2), (0, 2), (0, 2)] + [(0, 0)] * 11
    return Instance("TINY", 2, patterns, nurses, demand)


@pytest.fixture
def tiny():
    return make_tiny()


_acceptance_lines = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = "PASS" if rep.passed else "FAIL"
        _acceptance_lines.append(f"[{status}] {marker.args[0] if marker.args else item.name}")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in _acceptance_lines:
        terminalreporter.write_line(line)
    for line in getattr(terminalreporter.config, "_acceptance_notes", []):
        terminalreporter.write_line(line)


@pytest.fixture
def acceptance_note(request):
    """Append an informational line to the acceptance summary."""
    notes = request.config.__dict__.setdefault("_acceptance_notes", [])
    return notes.append
