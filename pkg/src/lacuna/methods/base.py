# %% IMPORTS

import abc
import typing as T

import numpy as np
import pydantic as pdt

from lacuna.core.dataset import LabeledDataset, ObservedTable
from lacuna.core.enums import ImputationMethod, Task

# %% VARIABLES

IMPUTATION_SUFFIXES: dict[ImputationMethod, str] = {
    ImputationMethod.ZERO: "zi",
    ImputationMethod.MEAN: "mi",
    ImputationMethod.KNN: "knni",
}

# %% METHODS


class Method(abc.ABC, pdt.BaseModel, frozen=True, extra="forbid"):
    """
    A benchmark method: one way of clustering or classifying an incomplete table.
    """

    KIND: str
    TASK: T.ClassVar[Task]

    @property
    def name(self) -> str:
        """Identifier used in run records and report tables."""
        return self.KIND


class ClusteringMethod(Method, frozen=True):
    TASK: T.ClassVar[Task] = Task.CLUSTERING

    @abc.abstractmethod
    def fit_predict(self, table: ObservedTable, n_clusters: int, seed: int) -> np.ndarray:
        """
        Cluster index per row. Must be implemented by subclasses.
        """
        raise NotImplementedError("Subclasses must implement `fit_predict`.")


class ClassificationMethod(Method, frozen=True):
    TASK: T.ClassVar[Task] = Task.CLASSIFICATION

    @abc.abstractmethod
    def predict(
        self, train: LabeledDataset, test: ObservedTable, seed: int
    ) -> np.ndarray:
        """
        Predicted label per test row. Must be implemented by subclasses.
        """
        raise NotImplementedError("Subclasses must implement `predict`.")


class ImputedMixin(pdt.BaseModel, frozen=True):
    """Completes the data with an imputer before a Euclidean algorithm runs."""

    imputation: ImputationMethod = ImputationMethod.ZERO
    imputation_k: int = pdt.Field(default=5, ge=1)

    @property
    def name(self) -> str:
        return f"{self.KIND}-after-{IMPUTATION_SUFFIXES[self.imputation]}"
