import pytest
from hypothesis import settings

# the first call of a numba kernel includes loading it from the cache
settings.register_profile("default", deadline=None)
settings.load_profile("default")

_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_KEY] = {}


@pytest.fixture
def acceptance(request):
    """Record the verdict for one acceptance criterion."""
    lines = request.config.stash[_KEY]

    def record(criterion: int, passed: bool, detail: str) -> bool:
        lines[criterion] = f"criterion {criterion:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(lines[criterion])
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_KEY, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
