# %% IMPORTS

import typing as T

import numpy as np
import pandas as pd
from pandera.typing import DataFrame
from scipy import optimize

from lacuna.core.models import RunRecord
from lacuna.core.schemas import (
    AggregateSchema,
    ROW_KEYS,
    RUN_KEYS,
    RunRecordSchema,
)

# %% VARIABLES

CLUSTERING_SCORE_NOTE: str = (
    "clustering accuracy: Hungarian-matched (optimal one-to-one cluster-to-class); "
    "classification accuracy: exact match"
)

# %% SCORES


def confusion_matrix(partition: T.Sequence, truth: T.Sequence) -> np.ndarray:
    """Square clusters x classes count matrix, zero-padded to the larger side."""
    partition, truth = np.asarray(partition), np.asarray(truth)
    if len(partition) != len(truth):
        raise ValueError(
            f"Length mismatch: {len(partition)} assignments vs {len(truth)} labels"
        )
    if len(partition) == 0:
        raise ValueError("Cannot score an empty partition")
    _, clusters = np.unique(partition, return_inverse=True)
    _, classes = np.unique(truth, return_inverse=True)
    size = max(clusters.max(), classes.max()) + 1
    confusion = np.zeros((size, size), dtype=int)
    np.add.at(confusion, (clusters, classes), 1)
    return confusion


def matched_accuracy(confusion: np.ndarray) -> float:
    """Best one-to-one matching of rows to columns, as a share of all counts."""
    confusion = np.asarray(confusion)
    size = max(confusion.shape)
    padded = np.zeros((size, size), dtype=confusion.dtype)
    padded[: confusion.shape[0], : confusion.shape[1]] = confusion
    rows, columns = optimize.linear_sum_assignment(padded, maximize=True)
    return float(padded[rows, columns].sum() / padded.sum())


def clustering_accuracy(partition: T.Sequence, truth: T.Sequence) -> float:
    return matched_accuracy(confusion_matrix(partition, truth))


def classification_accuracy(pred: T.Sequence, truth: T.Sequence) -> float:
    pred, truth = np.asarray(pred), np.asarray(truth)
    if len(pred) != len(truth):
        raise ValueError(f"Length mismatch: {len(pred)} predictions vs {len(truth)} labels")
    if len(pred) == 0:
        raise ValueError("Cannot score an empty prediction")
    return float(np.mean(pred == truth))


# %% AGGREGATION


def records_frame(records: T.Sequence[RunRecord]) -> DataFrame[RunRecordSchema]:
    frame = pd.DataFrame(
        [record.model_dump() for record in records],
        columns=list(RunRecordSchema.columns),
    )
    frame = frame.sort_values(RUN_KEYS + ["seed", "accuracy"], kind="stable")
    return RunRecordSchema.validate(frame.reset_index(drop=True))


def aggregate_runs(records: T.Sequence[RunRecord]) -> DataFrame[AggregateSchema]:
    """
    Mean and sample standard deviation per (dataset, mechanism, fraction, method).

    Records are sorted before reduction, so the result does not depend on input
    order. `best` flags the highest mean within each (dataset, mechanism,
    fraction) row; ties are all flagged.
    """
    if len(records) == 0:
        raise ValueError("No run records to aggregate")
    frame = records_frame(records)
    aggregates = (
        frame.groupby(RUN_KEYS, sort=True)["accuracy"]
        .agg(runs="size", mean="mean", std="std")
        .reset_index()
    )
    aggregates["std"] = aggregates["std"].fillna(0.0)
    best = aggregates.groupby(ROW_KEYS)["mean"].transform("max")
    aggregates["best"] = aggregates["mean"] == best
    return AggregateSchema.validate(aggregates)
