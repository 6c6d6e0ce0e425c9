import pathlib

import pytest

from helpers import t1_problem
from mlgdesign import build_redundant_mlg

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture
def t1():
    return t1_problem()


@pytest.fixture
def t1_instance(t1):
    return build_redundant_mlg(t1)


@pytest.fixture
def t1_path():
    return str(DATA_DIR / "t1.json")
