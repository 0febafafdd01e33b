from __future__ import annotations

from pathlib import Path

import pytest

from methodmover import model

FIXTURES = Path(__file__).parent / "fixtures"
DATA = Path(__file__).parent / "data"


def fixture_root(name: str) -> Path:
    return FIXTURES / name


@pytest.fixture(scope="session")
def bank_index() -> model.ProjectIndex:
    return model.build_index(FIXTURES / "bank")


@pytest.fixture(scope="session")
def esql_index() -> model.ProjectIndex:
    return model.build_index(FIXTURES / "esql")


@pytest.fixture(scope="session")
def warehouse_index() -> model.ProjectIndex:
    return model.build_index(FIXTURES / "warehouse")


@pytest.fixture(scope="session")
def staticmove_index() -> model.ProjectIndex:
    return model.build_index(FIXTURES / "staticmove")


@pytest.fixture()
def tmp_project(tmp_path: Path) -> Path:
    """A throwaway copy helper: tests that edit files copy a fixture first."""
    return tmp_path
