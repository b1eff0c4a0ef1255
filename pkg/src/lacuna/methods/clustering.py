# %% IMPORTS

import typing as T

import numpy as np
import pydantic as pdt

from lacuna.core import clustering
from lacuna.core.dataset import ObservedTable
from lacuna.core.discrepancy import (
    Dissimilarity,
    ObservedEuclidean,
    fit_discrepancy_model,
)
from lacuna.core.imputation import impute
from lacuna.methods.base import ClusteringMethod, ImputedMixin
from lacuna.logger import Logger

logger = Logger(__name__)

# %% METHODS


class KMeansPPAWPD(ClusteringMethod, frozen=True):
    KIND: T.Literal["kmpp-awpd"] = "kmpp-awpd"

    beta: float | None = pdt.Field(default=None, gt=0, lt=1)
    max_iter: int = pdt.Field(default=clustering.DEFAULT_MAX_ITER, ge=1)

    def _seed(
        self, table: ObservedTable, k: int, model: Dissimilarity, seed: int
    ) -> tuple[clustering.Centroid, ...]:
        return clustering.seed_kmeans_pp(table, k, model, seed)

    def fit_state(
        self, table: ObservedTable, n_clusters: int, seed: int
    ) -> clustering.ClusterState:
        model = fit_discrepancy_model(table, beta=self.beta)
        init = self._seed(table, n_clusters, model, seed)
        state = clustering.lloyd_awpd(table, init, model, max_iter=self.max_iter, seed=seed)
        logger.debug(
            f"{self.name}: {state.iteration} iterations, converged={state.converged}"
        )
        return state

    def fit_predict(self, table, n_clusters, seed):
        return self.fit_state(table, n_clusters, seed).membership


class ScalableAWPD(KMeansPPAWPD, frozen=True):
    KIND: T.Literal["scalable-awpd"] = "scalable-awpd"

    oversample: float | None = pdt.Field(default=None, gt=0)
    rounds: int = pdt.Field(default=clustering.DEFAULT_ROUNDS, ge=1)

    def _seed(self, table, k, model, seed):
        return clustering.seed_scalable(
            table, k, model, seed, oversample=self.oversample, rounds=self.rounds
        )


class KMeansFWPD(KMeansPPAWPD, frozen=True):
    """Penalized k-means with uniformly drawn initial centroids."""

    KIND: T.Literal["kmeans-fwpd"] = "kmeans-fwpd"

    def _seed(self, table, k, model, seed):
        return clustering.seed_random(table, k, seed)


class ImputedKMeans(ImputedMixin, ClusteringMethod, frozen=True):
    """Standard k-means from k-means++ seeds, after imputation."""

    KIND: T.Literal["kmeans-euclid"] = "kmeans-euclid"

    max_iter: int = pdt.Field(default=clustering.DEFAULT_MAX_ITER, ge=1)

    def fit_state(
        self, table: ObservedTable, n_clusters: int, seed: int
    ) -> clustering.ClusterState:
        if not table.is_complete:
            table = impute(table, self.imputation, k=self.imputation_k)
        init = clustering.seed_kmeans_pp(table, n_clusters, ObservedEuclidean(), seed)
        return clustering.kmeans(table, init, max_iter=self.max_iter)

    def fit_predict(self, table, n_clusters, seed) -> np.ndarray:
        return self.fit_state(table, n_clusters, seed).membership
