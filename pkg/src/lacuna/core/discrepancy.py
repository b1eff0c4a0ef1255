# %% IMPORTS

import abc
import typing as T

import numpy as np
import pydantic as pdt

from lacuna import configs
from lacuna.core.dataset import Instance, ObservedTable
from lacuna.logger import Logger

logger = Logger(__name__)

# %% VARIABLES

BETA_RANGE: tuple[float, float] = (0.1, 0.25)

# %% KERNELS


def _check_dims(a: Instance, b: Instance) -> None:
    if a.m != b.m:
        raise ValueError(f"Dimension mismatch: {a.m} vs {b.m} attributes")


def _common(point: Instance, mask: np.ndarray) -> np.ndarray:
    if mask.shape[-1] != point.m:
        raise ValueError(
            f"Dimension mismatch: {point.m} vs {mask.shape[-1]} attributes"
        )
    return mask & point.mask


def _squared_distances(
    point: Instance, filled: np.ndarray, common: np.ndarray
) -> np.ndarray:
    diff = np.where(common, filled - point.filled, 0.0)
    return (diff * diff).sum(axis=1)


# %% DISSIMILARITIES


class Dissimilarity(abc.ABC, pdt.BaseModel, frozen=True):
    """
    A dissimilarity between instances that may miss attributes.

    `to_rows` evaluates one point against every row of a (filled, mask) pair;
    `between` is the single-pair form and uses the same kernel.
    """

    KIND: str

    @abc.abstractmethod
    def to_rows(
        self, point: Instance, filled: np.ndarray, mask: np.ndarray
    ) -> np.ndarray:
        raise NotImplementedError("Subclasses must implement `to_rows`.")

    def to_table(self, point: Instance, table: ObservedTable) -> np.ndarray:
        return self.to_rows(point, table.filled, table.mask)

    def between(self, a: Instance, b: Instance) -> float:
        _check_dims(a, b)
        return float(self.to_rows(a, b.filled[np.newaxis], b.mask[np.newaxis])[0])


class ObservedEuclidean(Dissimilarity, frozen=True):
    """Euclidean distance over the commonly observed attributes."""

    KIND: T.Literal["euclidean"] = "euclidean"

    def to_rows(self, point, filled, mask):
        return np.sqrt(_squared_distances(point, filled, _common(point, mask)))


class PartialDistance(Dissimilarity, frozen=True):
    """Observed distance plus the fraction of attributes missing from the pair."""

    KIND: T.Literal["pdm"] = "pdm"

    def to_rows(self, point, filled, mask):
        common = _common(point, mask)
        missing = 1.0 - common.sum(axis=1) / point.m
        return np.sqrt(_squared_distances(point, filled, common)) + missing


class SentencedDistance(Dissimilarity, frozen=True):
    """sqrt(observed distance^2 + missing fraction)."""

    KIND: T.Literal["sdm"] = "sdm"

    def to_rows(self, point, filled, mask):
        common = _common(point, mask)
        missing = 1.0 - common.sum(axis=1) / point.m
        return np.sqrt(_squared_distances(point, filled, common) + missing)


class DiscrepancyModel(Dissimilarity, frozen=True):
    """
    Fitted attribute weighted penalty discrepancy.

    delta(a, b) = (1 - beta) * d(a, b) / d_max + beta * q(a, b), where d is the
    observed distance and q the weight share of attributes missing from a or b.
    d_max comes from the fitted table; points outside it may exceed a ratio of 1.
    """

    KIND: T.Literal["awpd"] = "awpd"

    weights: tuple[float, ...]
    beta: float = pdt.Field(..., gt=0.0, lt=1.0)
    d_max: float = pdt.Field(..., gt=0.0)
    weight_sum: float = pdt.Field(..., gt=0.0)

    @pdt.model_validator(mode="before")
    @classmethod
    def _cache_weight_sum(cls, data: T.Any) -> T.Any:
        if isinstance(data, dict) and data.get("weight_sum") is None:
            data = dict(data)
            data["weight_sum"] = float(np.sum(np.asarray(data["weights"], dtype=float)))
        return data

    @pdt.model_validator(mode="after")
    def _check_weights(self) -> "DiscrepancyModel":
        if any(weight < 0 for weight in self.weights):
            raise ValueError("Attribute weights must be non-negative")
        total = float(np.sum(self.weights))
        if abs(self.weight_sum - total) > 1e-12 * total:
            raise ValueError(f"weight_sum {self.weight_sum} differs from {total}")
        return self

    @property
    def m(self) -> int:
        return len(self.weights)

    def penalty_rows(self, point: Instance, mask: np.ndarray) -> np.ndarray:
        common = _common(point, mask)
        weights = np.asarray(self.weights)
        return np.where(common, 0.0, weights).sum(axis=1) / self.weight_sum

    def to_rows(self, point, filled, mask):
        if point.m != self.m:
            raise ValueError(f"Dimension mismatch: model has {self.m} attributes")
        common = _common(point, mask)
        distances = np.sqrt(_squared_distances(point, filled, common))
        penalties = np.where(common, 0.0, np.asarray(self.weights)).sum(axis=1)
        return (1.0 - self.beta) * distances / self.d_max + self.beta * (
            penalties / self.weight_sum
        )


# %% MEASURES


def observed_distance(a: Instance, b: Instance) -> float:
    """Euclidean distance over attributes observed by both; 0 when none are."""
    return ObservedEuclidean().between(a, b)


def pdm(a: Instance, b: Instance) -> float:
    return PartialDistance().between(a, b)


def sdm(a: Instance, b: Instance) -> float:
    return SentencedDistance().between(a, b)


def penalty(a: Instance, b: Instance, model: DiscrepancyModel) -> float:
    _check_dims(a, b)
    return float(model.penalty_rows(a, b.mask[np.newaxis])[0])


def awpd(a: Instance, b: Instance, model: DiscrepancyModel) -> float:
    return model.between(a, b)


# %% FITTING


def default_beta(table: ObservedTable) -> float:
    """Missing-cell fraction clamped to [0.1, 0.25]."""
    return float(np.clip(table.missing_fraction, *BETA_RANGE))


def max_observed_distance(table: ObservedTable) -> float:
    best = 0.0
    for i in range(table.n - 1):
        point = table.instance(i)
        common = _common(point, table.mask[i + 1 :])
        squared = _squared_distances(point, table.filled[i + 1 :], common)
        best = max(best, float(squared.max()))
    return float(np.sqrt(best))


def fit_discrepancy_model(
    table: ObservedTable,
    beta: float | None = None,
    weights: T.Sequence[float] | None = None,
) -> DiscrepancyModel:
    """
    Fit weights and d_max on `table`.

    Weights default to the fraction of rows observing each attribute; beta
    defaults to `default_beta(table)`.
    """
    if table.n < 2:
        raise ValueError(f"Fitting needs at least 2 instances, got {table.n}")
    beta = default_beta(table) if beta is None else beta
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    if weights is None:
        weights = table.mask.sum(axis=0) / table.n
    weights = tuple(float(weight) for weight in weights)
    if len(weights) != table.m:
        raise ValueError(f"Expected {table.m} weights, got {len(weights)}")
    if not any(weight > 0 for weight in weights):
        raise ValueError("All attribute weights are zero")
    d_max = max_observed_distance(table)
    if d_max == 0.0:
        logger.warning("All pairwise observed distances are zero, using d_max=1")
        d_max = 1.0
    model = DiscrepancyModel(weights=weights, beta=beta, d_max=d_max)
    logger.debug(f"Fitted discrepancy model: beta={beta}, d_max={d_max}")
    return model


def pairwise_discrepancy(table: ObservedTable, model: Dissimilarity) -> np.ndarray:
    """n x n matrix of discrepancies (O(n^2) memory)."""
    return np.stack([model.to_table(table.instance(i), table) for i in range(table.n)])


# %% PERSISTENCE


def save_model(model: DiscrepancyModel, path: str) -> None:
    configs.write_file(
        path,
        {
            "KIND": model.KIND,
            "weights": [float(weight) for weight in model.weights],
            "beta": float(model.beta),
            "d_max": float(model.d_max),
        },
    )


def load_model(path: str) -> DiscrepancyModel:
    object_ = configs.to_object(configs.parse_file(path))
    return DiscrepancyModel.model_validate(object_)
