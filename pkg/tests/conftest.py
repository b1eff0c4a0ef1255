import os
import sys

import numpy as np
import pytest
from dotenv import load_dotenv

load_dotenv()

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../src")))

from lacuna.core.dataset import LabeledDataset, ObservedTable, load_builtin  # noqa: E402


@pytest.fixture
def worked_table() -> ObservedTable:
    """Three points (*, 5), (2, 3), (3, 6)."""
    return ObservedTable(values=[[np.nan, 5.0], [2.0, 3.0], [3.0, 6.0]])


@pytest.fixture
def worked_dataset(worked_table: ObservedTable) -> LabeledDataset:
    return LabeledDataset(table=worked_table, labels=["a", "b", "a"])


@pytest.fixture(scope="session")
def iris() -> LabeledDataset:
    return load_builtin("iris")


@pytest.fixture
def blobs() -> LabeledDataset:
    """Two well-separated Gaussian blobs centered at -5 and +5."""
    rng = np.random.default_rng(42)
    values = np.vstack(
        [rng.normal(-5.0, 0.1, size=(50, 2)), rng.normal(5.0, 0.1, size=(50, 2))]
    )
    labels = ["left"] * 50 + ["right"] * 50
    return LabeledDataset(table=ObservedTable(values=values), labels=labels)


@pytest.fixture
def synthetic_table() -> ObservedTable:
    """1000 x 4 complete table of independent standard normals."""
    rng = np.random.default_rng(7)
    return ObservedTable(values=rng.normal(size=(1000, 4)))


@pytest.fixture
def labeled_csv(tmp_path) -> str:
    path = os.path.join(tmp_path, "points.csv")
    with open(path, "w", encoding="utf-8") as writer:
        writer.write("x,y,label\n?,5,a\n2,3,b\n3,6,a\n")
    return path
