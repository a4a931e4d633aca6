import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cadselect import fixtures
from cadselect.mappings import TimeGrid
from cadselect.regularity import check_regularity

settings.register_profile(
    "cadselect", deadline=None, max_examples=60, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("cadselect")


@pytest.fixture(scope="session")
def battery():
    return fixtures.characterization_battery()


@pytest.fixture(scope="session")
def checked():
    """Fixture name -> (mapping, grid, report) at N = 1000, computed once."""
    cache = {}

    def get(name, cells=1000):
        key = (name, cells)
        if key not in cache:
            m = getattr(fixtures, name)()
            grid = TimeGrid.for_mapping(m, cells)
            cache[key] = (m, grid, check_regularity(m, grid))
        return cache[key]
    return get


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria: criterion number -> (title, all marked tests passed)
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion exercised by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or rep.failed):
        return
    number, title = mark.args
    _, ok = _CRITERIA.get(number, (title, True))
    _CRITERIA[number] = (title, ok and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
