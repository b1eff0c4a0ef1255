# %% IMPORTS

import numpy as np

from lacuna.core.dataset import ObservedTable
from lacuna.core.discrepancy import ObservedEuclidean
from lacuna.core.enums import ImputationMethod
from lacuna.logger import Logger

logger = Logger(__name__)

# %% IMPUTERS


def _complete(table: ObservedTable, values: np.ndarray) -> ObservedTable:
    return table.with_values(values, np.ones_like(table.mask))


def _observed_means(table: ObservedTable) -> np.ndarray:
    counts = table.mask.sum(axis=0)
    unobserved = np.flatnonzero(counts == 0)
    if len(unobserved) > 0:
        raise ValueError(
            f"Attribute '{table.attribute_names[unobserved[0]]}' is observed nowhere"
        )
    return table.filled.sum(axis=0) / counts


def impute_zero(table: ObservedTable) -> ObservedTable:
    return _complete(table, table.filled)


def impute_mean(table: ObservedTable) -> ObservedTable:
    means = _observed_means(table)
    return _complete(table, np.where(table.mask, table.filled, means))


def impute_knn(table: ObservedTable, k: int) -> ObservedTable:
    """
    Fill each unobserved cell (i, l) with the mean of attribute l over the k
    nearest rows that observe l, nearest by observed distance.

    Distance ties go to the lower row index.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    means = _observed_means(table)
    values = table.filled.copy()
    metric = ObservedEuclidean()
    for i in np.flatnonzero(~table.mask.all(axis=1)):
        distances = metric.to_table(table.instance(i), table)
        order = np.argsort(distances, kind="stable")
        order = order[order != i]
        for l in np.flatnonzero(~table.mask[i]):
            donors = order[table.mask[order, l]][:k]
            values[i, l] = table.filled[donors, l].mean() if len(donors) else means[l]
    return _complete(table, values)


def impute(
    table: ObservedTable, method: ImputationMethod, k: int = 5
) -> ObservedTable:
    match method:
        case ImputationMethod.ZERO:
            return impute_zero(table)
        case ImputationMethod.MEAN:
            return impute_mean(table)
        case ImputationMethod.KNN:
            return impute_knn(table, k)
    raise ValueError(f"Unknown imputation method: {method}")
