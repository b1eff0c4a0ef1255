# %% IMPORTS

import typing as T

import numpy as np
import pydantic as pdt
from sklearn.cluster import KMeans

from lacuna.core.dataset import Instance, ObservedTable
from lacuna.core.discrepancy import Dissimilarity
from lacuna.logger import Logger

logger = Logger(__name__)

# %% VARIABLES

DEFAULT_MAX_ITER: int = 100
DEFAULT_ROUNDS: int = 5

# %% TYPES


def _read_only(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


class Centroid(pdt.BaseModel):
    """Cluster center; `defined` marks the attributes that hold a value."""

    model_config = pdt.ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray
    defined: np.ndarray

    @pdt.model_validator(mode="before")
    @classmethod
    def _coerce_arrays(cls, data: T.Any) -> T.Any:
        if not isinstance(data, dict):
            return data
        defined = np.array(data["defined"], dtype=bool, ndmin=1, copy=True)
        values = np.asarray(data["values"], dtype=float)
        if values.shape != defined.shape:
            raise ValueError(
                f"Centroid values {values.shape} do not match defined {defined.shape}"
            )
        values = np.where(defined, values, np.nan)
        return {"values": _read_only(values), "defined": _read_only(defined)}

    @pdt.model_validator(mode="after")
    def _check_defined(self) -> "Centroid":
        if not self.defined.any():
            raise ValueError("A centroid needs at least one defined attribute")
        return self

    @classmethod
    def from_instance(cls, instance: Instance) -> "Centroid":
        return cls(values=instance.values, defined=instance.mask)

    @property
    def m(self) -> int:
        return len(self.defined)

    def value(self, l: int) -> float:
        if not self.defined[l]:
            raise ValueError(f"Centroid attribute {l} is undefined")
        return float(self.values[l])

    def as_instance(self) -> Instance:
        return Instance(self.values, self.defined)


class ClusterState(pdt.BaseModel):
    """
    Outcome of the alternating optimization.

    `membership[i] = j` encodes u_ij = 1; `objective_trace` holds f(U, Z) after
    every completed update step.
    """

    model_config = pdt.ConfigDict(frozen=True, arbitrary_types_allowed=True)

    centroids: tuple[Centroid, ...]
    membership: np.ndarray
    iteration: int = pdt.Field(..., ge=0)
    objective_trace: tuple[float, ...]
    converged: bool = False

    @pdt.field_validator("membership", mode="before")
    @classmethod
    def _coerce_membership(cls, membership: T.Any) -> np.ndarray:
        return _read_only(np.array(membership, dtype=int, ndmin=1, copy=True))

    @pdt.model_validator(mode="after")
    def _check_membership(self) -> "ClusterState":
        if len(self.centroids) == 0:
            raise ValueError("A cluster state needs at least one centroid")
        if self.membership.min() < 0 or self.membership.max() >= self.k:
            raise ValueError(f"Membership must index one of the {self.k} centroids")
        return self

    @property
    def k(self) -> int:
        return len(self.centroids)

    @property
    def u(self) -> np.ndarray:
        return np.eye(self.k, dtype=int)[self.membership]


# %% DISCREPANCIES


def point_centroid_discrepancy(
    a: Instance, z: Centroid, model: Dissimilarity
) -> float:
    """Discrepancy with the centroid's defined set standing in for its observed set."""
    return model.between(a, z.as_instance())


def discrepancy_matrix(
    table: ObservedTable, centroids: T.Sequence[Centroid], model: Dissimilarity
) -> np.ndarray:
    """n x k matrix of point-to-centroid discrepancies."""
    return np.column_stack(
        [model.to_table(centroid.as_instance(), table) for centroid in centroids]
    )


def _point_costs(
    table: ObservedTable,
    centroids: T.Sequence[Centroid],
    membership: np.ndarray,
    model: Dissimilarity,
) -> np.ndarray:
    costs = np.zeros(table.n)
    for j, centroid in enumerate(centroids):
        members = np.flatnonzero(membership == j)
        if len(members) > 0:
            costs[members] = model.to_rows(
                centroid.as_instance(), table.filled[members], table.mask[members]
            )
    return costs


def objective(table: ObservedTable, state: ClusterState, model: Dissimilarity) -> float:
    """f(U, Z): sum of each instance's discrepancy to its own centroid."""
    if len(state.membership) != table.n:
        raise ValueError(
            f"Membership covers {len(state.membership)} rows, table has {table.n}"
        )
    return float(_point_costs(table, state.centroids, state.membership, model).sum())


def assign(
    table: ObservedTable, centroids: T.Sequence[Centroid], model: Dissimilarity
) -> np.ndarray:
    """Closest centroid per instance; ties go to the lowest cluster index."""
    return discrepancy_matrix(table, centroids, model).argmin(axis=1)


# %% SEEDING


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")


def _centroids(table: ObservedTable, rows: T.Iterable[int]) -> tuple[Centroid, ...]:
    return tuple(Centroid.from_instance(table.instance(int(i))) for i in rows)


def _pick(
    weights: np.ndarray, excluded: np.ndarray, rng: np.random.Generator
) -> int:
    """Draw an index proportionally to `weights`, never an excluded one."""
    weights = np.where(excluded, 0.0, weights)
    total = weights.sum()
    if total > 0:
        return int(rng.choice(len(weights), p=weights / total))
    return int(rng.choice(np.flatnonzero(~excluded)))


def _weighted_kmeans_pp(
    table: ObservedTable,
    rows: np.ndarray,
    point_weights: np.ndarray,
    k: int,
    model: Dissimilarity,
    rng: np.random.Generator,
) -> list[int]:
    """D^2 seeding among `rows`, each row counting `point_weights` times."""
    filled, mask = table.filled[rows], table.mask[rows]
    chosen = np.zeros(len(rows), dtype=bool)
    first = _pick(point_weights.astype(float), chosen, rng)
    chosen[first] = True
    closest = model.to_rows(table.instance(rows[first]), filled, mask)
    picks = [first]
    while len(picks) < k:
        nxt = _pick(point_weights * closest**2, chosen, rng)
        chosen[nxt] = True
        picks.append(nxt)
        closest = np.minimum(closest, model.to_rows(table.instance(rows[nxt]), filled, mask))
    return [int(rows[pick]) for pick in picks]


def seed_kmeans_pp(
    table: ObservedTable, k: int, model: Dissimilarity, seed: int
) -> tuple[Centroid, ...]:
    """
    k-means++ seeding: the first centroid is uniform, later ones are drawn with
    probability proportional to the squared discrepancy to the nearest chosen one.
    Centroids copy distinct instances, missing attributes included.
    """
    _check_k(k, table.n)
    rng = np.random.default_rng(seed)
    rows = _weighted_kmeans_pp(
        table, np.arange(table.n), np.ones(table.n), k, model, rng
    )
    return _centroids(table, rows)


def seed_scalable(
    table: ObservedTable,
    k: int,
    model: Dissimilarity,
    seed: int,
    oversample: float | None = None,
    rounds: int = DEFAULT_ROUNDS,
) -> tuple[Centroid, ...]:
    """
    Scalable (k-means||) seeding.

    Each round samples every instance independently with probability
    min(1, oversample * D^2 / phi); candidates are then weighted by the number
    of instances nearest to them and reduced to k by weighted k-means++.
    """
    _check_k(k, table.n)
    oversample = 2.0 * k if oversample is None else oversample
    if oversample <= 0:
        raise ValueError(f"oversample must be positive, got {oversample}")
    if rounds < 1:
        raise ValueError(f"rounds must be at least 1, got {rounds}")
    rng = np.random.default_rng(seed)
    chosen = np.zeros(table.n, dtype=bool)
    first = int(rng.integers(table.n))
    chosen[first] = True
    candidates = [first]
    closest = model.to_table(table.instance(first), table)
    for round_ in range(rounds):
        cost = np.where(chosen, 0.0, closest**2)
        phi = cost.sum()
        if phi == 0:
            break
        draws = rng.random(table.n)
        added = np.flatnonzero((draws < np.minimum(1.0, oversample * cost / phi)) & ~chosen)
        for i in added:
            chosen[i] = True
            candidates.append(int(i))
            closest = np.minimum(closest, model.to_table(table.instance(i), table))
        logger.debug(f"Scalable seeding round {round_ + 1}: {len(candidates)} candidates")
    if len(candidates) < k:
        extra = rng.choice(np.flatnonzero(~chosen), k - len(candidates), replace=False)
        candidates.extend(int(i) for i in extra)
    rows = np.asarray(candidates)
    if len(rows) == k:
        return _centroids(table, rows)
    nearest = discrepancy_matrix(table, _centroids(table, rows), model).argmin(axis=1)
    counts = np.bincount(nearest, minlength=len(rows)).astype(float)
    return _centroids(table, _weighted_kmeans_pp(table, rows, counts, k, model, rng))


def seed_random(table: ObservedTable, k: int, seed: int) -> tuple[Centroid, ...]:
    """k distinct instances drawn uniformly."""
    _check_k(k, table.n)
    rng = np.random.default_rng(seed)
    return _centroids(table, rng.choice(table.n, size=k, replace=False))


# %% ITERATIONS


def _update(
    table: ObservedTable,
    centroids: tuple[Centroid, ...],
    membership: np.ndarray,
    costs: np.ndarray,
    model: Dissimilarity,
) -> tuple[Centroid, ...]:
    """
    Move each centroid to the mean of its members' observed values.

    Attributes observed by no member keep their previous value, empty clusters
    keep their centroid, and a move that would raise the cluster's share of
    the objective is dropped.
    """
    updated = []
    for j, centroid in enumerate(centroids):
        members = np.flatnonzero(membership == j)
        if len(members) == 0:
            updated.append(centroid)
            continue
        filled, mask = table.filled[members], table.mask[members]
        counts = mask.sum(axis=0)
        observed = counts > 0
        means = np.divide(
            filled.sum(axis=0), counts, out=np.zeros(table.m), where=observed
        )
        candidate = Centroid(
            values=np.where(observed, means, centroid.as_instance().filled),
            defined=centroid.defined | observed,
        )
        current = costs[members].sum()
        proposed = model.to_rows(candidate.as_instance(), filled, mask).sum()
        updated.append(candidate if proposed <= current else centroid)
    return tuple(updated)


def lloyd(
    table: ObservedTable,
    init: T.Sequence[Centroid],
    model: Dissimilarity,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ClusterState:
    """
    Alternate assignment and centroid update until the membership stops
    changing or `max_iter` updates have run.

    The mean minimizes summed squared distances, not the summed distances this
    objective adds up, so a centroid only moves to its members' mean when the
    move does not raise its cluster's cost. `objective_trace` never increases;
    the centroids can stop short of the members' means (see `kmeans` for the
    unconditional update).
    """
    if max_iter < 1:
        raise ValueError(f"max_iter must be at least 1, got {max_iter}")
    if len(init) == 0:
        raise ValueError("At least one initial centroid is required")
    if any(centroid.m != table.m for centroid in init):
        raise ValueError("Initial centroids do not match the table dimension")
    centroids = tuple(init)
    membership: np.ndarray | None = None
    trace: list[float] = []
    converged = False
    iteration = 0
    for t in range(1, max_iter + 1):
        distances = discrepancy_matrix(table, centroids, model)
        assignment = distances.argmin(axis=1)
        if membership is not None and np.array_equal(assignment, membership):
            converged = True
            break
        membership = assignment
        costs = distances[np.arange(table.n), membership]
        centroids = _update(table, centroids, membership, costs, model)
        trace.append(float(_point_costs(table, centroids, membership, model).sum()))
        iteration = t
        logger.debug(f"Iteration {t}: objective={trace[-1]:.12g}")
    return ClusterState(
        centroids=centroids,
        membership=membership,
        iteration=iteration,
        objective_trace=tuple(trace),
        converged=converged,
    )


def lloyd_awpd(
    table: ObservedTable,
    init: T.Sequence[Centroid],
    model: Dissimilarity,
    max_iter: int = DEFAULT_MAX_ITER,
    seed: int | None = None,
) -> ClusterState:
    """
    K-means iterations under the attribute weighted penalty discrepancy.

    The iterations draw no random numbers; `seed` is accepted so callers can
    pass the same run seed they used for seeding.
    """
    return lloyd(table, init, model, max_iter=max_iter)


def kmeans(
    table: ObservedTable,
    init: T.Sequence[Centroid],
    max_iter: int = DEFAULT_MAX_ITER,
) -> ClusterState:
    """
    Standard k-means (Lloyd) on a complete table, started from `init`.

    Every update moves a centroid to the mean of its members, unconditionally.
    The objective is the within-cluster sum of squares, so `objective_trace`
    holds the single final value reported by scikit-learn.
    """
    if not table.is_complete:
        raise ValueError("k-means needs a complete table, impute it first")
    if max_iter < 1:
        raise ValueError(f"max_iter must be at least 1, got {max_iter}")
    if len(init) == 0:
        raise ValueError("At least one initial centroid is required")
    if any(centroid.m != table.m or not centroid.defined.all() for centroid in init):
        raise ValueError("Initial centroids must be fully defined on the table's attributes")
    estimator = KMeans(
        n_clusters=len(init),
        init=np.stack([centroid.values for centroid in init]),
        n_init=1,
        max_iter=max_iter,
        tol=0.0,
        algorithm="lloyd",
    )
    membership = estimator.fit_predict(table.values)
    iteration = int(estimator.n_iter_)
    logger.debug(f"k-means: {iteration} iterations, inertia={estimator.inertia_:.12g}")
    return ClusterState(
        centroids=tuple(
            Centroid(values=center, defined=np.ones(table.m, dtype=bool))
            for center in estimator.cluster_centers_
        ),
        membership=membership,
        iteration=iteration,
        objective_trace=(float(estimator.inertia_),),
        converged=iteration < max_iter,
    )
