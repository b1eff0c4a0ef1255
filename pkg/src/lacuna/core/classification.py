# %% IMPORTS

import typing as T

import numpy as np
import pydantic as pdt

from lacuna.core.dataset import Instance, LabeledDataset, ObservedTable
from lacuna.core.discrepancy import DiscrepancyModel, Dissimilarity
from lacuna.logger import Logger

logger = Logger(__name__)

# %% VARIABLES

DEFAULT_K: int = 5

# %% TYPES


class NeighborSet(pdt.BaseModel):
    """Training rows nearest to a point, ascending by discrepancy."""

    model_config = pdt.ConfigDict(frozen=True, arbitrary_types_allowed=True)

    indices: np.ndarray
    discrepancies: np.ndarray

    @pdt.field_validator("indices", "discrepancies", mode="before")
    @classmethod
    def _coerce_array(cls, array: T.Any, info: pdt.ValidationInfo) -> np.ndarray:
        dtype = int if info.field_name == "indices" else float
        array = np.array(array, dtype=dtype, ndmin=1, copy=True)
        array.flags.writeable = False
        return array

    @pdt.model_validator(mode="after")
    def _check_order(self) -> "NeighborSet":
        if len(self.indices) != len(self.discrepancies):
            raise ValueError(
                f"{len(self.indices)} indices for {len(self.discrepancies)} discrepancies"
            )
        if len(np.unique(self.indices)) != len(self.indices):
            raise ValueError("Neighbor indices must be distinct")
        if np.any(np.diff(self.discrepancies) < 0):
            raise ValueError("Neighbor discrepancies must be ascending")
        return self

    def __len__(self) -> int:
        return len(self.indices)


# %% NEIGHBORS


def neighbor_set(
    p: Instance, train: ObservedTable, k: int, model: Dissimilarity
) -> NeighborSet:
    """
    The min(k, n1) training instances with the smallest discrepancy to `p`;
    ties at the boundary go to the lowest row index.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if train.n == 0:
        raise ValueError("Training set is empty")
    discrepancies = model.to_table(p, train)
    order = np.argsort(discrepancies, kind="stable")[:k]
    return NeighborSet(indices=order, discrepancies=discrepancies[order])


# %% PREDICTION


def _vote(labels: np.ndarray, rng: np.random.Generator) -> str:
    candidates, counts = np.unique(labels, return_counts=True)
    winners = candidates[counts == counts.max()]
    if len(winners) == 1:
        return str(winners[0])
    return str(rng.choice(winners))


def knn_predict(
    train: LabeledDataset,
    test: ObservedTable,
    k: int,
    model: Dissimilarity,
    seed: int,
) -> np.ndarray:
    """
    Majority label among each test instance's neighbors.

    Label ties are broken uniformly at random; every test row draws from its own
    child stream of `seed`, so predictions do not depend on evaluation order.
    """
    if train.n == 0:
        raise ValueError("Training set is empty")
    if test.m != train.table.m:
        raise ValueError(
            f"Dimension mismatch: train has {train.table.m}, test has {test.m} attributes"
        )
    streams = np.random.SeedSequence(seed).spawn(test.n)
    predictions = []
    for i, stream in enumerate(streams):
        neighbors = neighbor_set(test.instance(i), train.table, k, model)
        predictions.append(
            _vote(train.labels[neighbors.indices], np.random.default_rng(stream))
        )
    return np.array(predictions, dtype=str)


def knn_awpd_predict(
    train: LabeledDataset,
    test: ObservedTable,
    k: int,
    model: DiscrepancyModel,
    seed: int,
) -> np.ndarray:
    """kNN under the attribute weighted penalty discrepancy (fit it on train + test)."""
    return knn_predict(train, test, k, model, seed)
