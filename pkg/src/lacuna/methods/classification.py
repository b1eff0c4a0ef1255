# %% IMPORTS

import typing as T

import pydantic as pdt

from lacuna.core import classification
from lacuna.core.dataset import LabeledDataset, ObservedTable
from lacuna.core.discrepancy import (
    Dissimilarity,
    ObservedEuclidean,
    PartialDistance,
    SentencedDistance,
    fit_discrepancy_model,
)
from lacuna.core.imputation import impute
from lacuna.methods.base import ClassificationMethod, ImputedMixin

# %% METHODS


class KNNAWPD(ClassificationMethod, frozen=True):
    """kNN under a discrepancy model fitted on train and test together."""

    KIND: T.Literal["knn-awpd"] = "knn-awpd"

    beta: float | None = pdt.Field(default=None, gt=0, lt=1)
    n_neighbors: int = pdt.Field(default=classification.DEFAULT_K, ge=1)

    def _model(self, train: LabeledDataset, test: ObservedTable) -> Dissimilarity:
        return fit_discrepancy_model(train.table.vstack(test), beta=self.beta)

    def predict(self, train, test, seed):
        model = self._model(train, test)
        return classification.knn_predict(train, test, self.n_neighbors, model, seed)


class KNNFWPD(KNNAWPD, frozen=True):
    """Same vote, with the discrepancy model fitted on the training rows only."""

    KIND: T.Literal["knn-fwpd"] = "knn-fwpd"

    def _model(self, train, test):
        return fit_discrepancy_model(train.table, beta=self.beta)


class KNNPDM(KNNAWPD, frozen=True):
    KIND: T.Literal["knn-pdm"] = "knn-pdm"

    def _model(self, train, test):
        return PartialDistance()


class KNNSDM(KNNAWPD, frozen=True):
    KIND: T.Literal["knn-sdm"] = "knn-sdm"

    def _model(self, train, test):
        return SentencedDistance()


class ImputedKNN(ImputedMixin, ClassificationMethod, frozen=True):
    """
    Euclidean kNN after imputing train and test together, as one table.
    """

    KIND: T.Literal["knn-euclid"] = "knn-euclid"

    n_neighbors: int = pdt.Field(default=classification.DEFAULT_K, ge=1)

    def predict(self, train, test, seed):
        table = train.table.vstack(test)
        if not table.is_complete:
            table = impute(table, self.imputation, k=self.imputation_k)
        completed = train.with_table(table.take(range(train.n)))
        completed_test = table.take(range(train.n, table.n))
        return classification.knn_predict(
            completed, completed_test, self.n_neighbors, ObservedEuclidean(), seed
        )
