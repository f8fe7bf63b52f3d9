import pathlib
import sys

import pytest

from causalid import MixedGraph

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def load_fig(name: str) -> MixedGraph:
    return MixedGraph.from_json((FIXTURES / f"{name}.json").read_text())


@pytest.fixture(scope="session")
def fig1a():
    return load_fig("fig1a")


@pytest.fixture(scope="session")
def fig1b():
    return load_fig("fig1b")


@pytest.fixture(scope="session")
def fig1c():
    return load_fig("fig1c")


@pytest.fixture(scope="session")
def fig1d():
    return load_fig("fig1d")


@pytest.fixture(scope="session")
def fig1e():
    return load_fig("fig1e")
