import dataclasses

import pytest

from newell.pde import SolverConfig, make_initial
from newell.scattering import KGrid, ScatteringSettings, build_table

SMALL_GRID = KGrid(0.05, 5.0, 400)


@pytest.fixture(scope="session")
def solver():
    return SolverConfig()


@pytest.fixture(scope="session")
def small_settings():
    return ScatteringSettings(grid=SMALL_GRID, spot_checks=20)


@pytest.fixture(scope="session")
def right_table(solver, small_settings):
    """The paper-right preset, sigma = +1, 400-point half grid."""
    return build_table(make_initial("paper-right", solver), small_settings)


@pytest.fixture(scope="session")
def right_table_minus(solver, small_settings):
    cfg = dataclasses.replace(solver, sigma=-1)
    return build_table(make_initial("paper-right", cfg), small_settings)


# acceptance criteria report: one line per criterion at the end of the run
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def accept():
    def record(name: str, passed: bool, detail: str) -> bool:
        ACCEPTANCE[name] = (bool(passed), detail)
        print(f"{name} {'PASS' if passed else 'FAIL'}: {detail}")
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{name} {'PASS' if passed else 'FAIL'}: {detail}")
