from pathlib import Path

import pytest

from permgrp import load_group

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def groups():
    """Catalog groups by name, closed once per session."""
    return {path.stem: load_group(path) for path in sorted((DATA / "groups").glob("*.json"))}
