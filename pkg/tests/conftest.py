import pytest

from privstream import FovSpec, LinkBudget, StreamConfig, TileGrid, TileMediaSpec, tile_bits


@pytest.fixture
def grid():
    return TileGrid(10, 20)


@pytest.fixture
def fov():
    return FovSpec(50.0, 33)


@pytest.fixture
def budget_4k():
    s_com, s_cpt = tile_bits(TileMediaSpec())
    return LinkBudget(2.85e9, 2.2e9, s_com, s_cpt, 200)


@pytest.fixture
def stream():
    return StreamConfig(T_seg=1.0, l0=3, tau=0.1)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
