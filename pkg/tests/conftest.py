import numpy as np
import pytest

from tablefold import data as da
from tablefold.engine import TableState

from _synth import make_dataset


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


@pytest.fixture
def small_dataset():
    """3 rows: name text, age numerical (one missing), continent categorical."""
    return make_dataset([
        ("name", da.TEXT, ["A", "B", "C"]),
        ("age", da.NUMERICAL, [30.0, None, 25.0]),
        ("continent", da.CATEGORICAL, (["Asia", "Africa"], [0, 1, 0])),
    ], 3)


@pytest.fixture
def small_state(small_dataset):
    return TableState(small_dataset)
