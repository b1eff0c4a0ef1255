# %% IMPORTS

import io
import typing as T

import cloudpathlib as cpl
import numpy as np
import pandas as pd
import pydantic as pdt
from sklearn import datasets as skd
from sklearn.model_selection import train_test_split

from lacuna.logger import Logger

logger = Logger(__name__)

# %% VARIABLES

MISSING_MARKERS: frozenset[str] = frozenset({"", "?", "na", "nan"})
OUTPUT_MARKER: str = "?"
BUILTIN_PREFIX: str = "builtin:"
BUILTIN_LOADERS: dict[str, T.Callable[[], T.Any]] = {
    "iris": skd.load_iris,
    "wine": skd.load_wine,
    "breast_cancer": skd.load_breast_cancer,
}

# %% INSTANCES


class Instance(T.NamedTuple):
    """One row of a table: values (NaN where unobserved) and its observed mask."""

    values: np.ndarray
    mask: np.ndarray

    @property
    def m(self) -> int:
        return len(self.mask)

    @property
    def filled(self) -> np.ndarray:
        return np.where(self.mask, self.values, 0.0)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


# %% TABLES


class ObservedTable(pdt.BaseModel):
    """
    n x m numeric matrix with a per-cell observed mask.

    Unobserved cells hold NaN. Numeric kernels read `filled` (zeros at unobserved
    cells, always combined with the mask), so a stray read of an unobserved cell
    shows up as NaN in results.
    """

    model_config = pdt.ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray
    mask: np.ndarray
    attribute_names: tuple[str, ...] = ()

    _filled: np.ndarray = pdt.PrivateAttr()

    @pdt.model_validator(mode="before")
    @classmethod
    def _coerce_arrays(cls, data: T.Any) -> T.Any:
        if not isinstance(data, dict):
            return data
        values = np.array(data["values"], dtype=float, ndmin=2, copy=True)
        mask = np.array(data.get("mask", np.isfinite(values)), dtype=bool, copy=True)
        if mask.shape != values.shape:
            raise ValueError(
                f"Mask shape {mask.shape} does not match values shape {values.shape}"
            )
        values[~mask] = np.nan
        names = tuple(data.get("attribute_names") or ())
        if not names:
            names = tuple(f"x{l}" for l in range(values.shape[1]))
        return {"values": _frozen(values), "mask": _frozen(mask), "attribute_names": names}

    @pdt.model_validator(mode="after")
    def _check_invariants(self) -> "ObservedTable":
        if self.values.ndim != 2:
            raise ValueError("Table values must be a 2-dimensional matrix")
        if len(self.attribute_names) != self.m:
            raise ValueError(
                f"Expected {self.m} attribute names, got {len(self.attribute_names)}"
            )
        if not np.all(np.isfinite(self.values[self.mask])):
            raise ValueError("Observed cells must hold finite numbers")
        empty_rows = np.flatnonzero(~self.mask.any(axis=1))
        if len(empty_rows) > 0:
            raise ValueError(f"Row {empty_rows[0]} has no observed attribute")
        return self

    def model_post_init(self, __context: T.Any) -> None:
        self._filled = _frozen(np.where(self.mask, self.values, 0.0))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def filled(self) -> np.ndarray:
        return self._filled

    @property
    def missing_fraction(self) -> float:
        return float(1.0 - self.mask.mean()) if self.mask.size else 0.0

    @property
    def is_complete(self) -> bool:
        return bool(self.mask.all())

    @property
    def observed_columns(self) -> np.ndarray:
        """Attributes observed in every row."""
        return np.flatnonzero(self.mask.all(axis=0))

    @property
    def missing_columns(self) -> np.ndarray:
        """Attributes unobserved in at least one row."""
        return np.flatnonzero(~self.mask.all(axis=0))

    def observers(self, l: int) -> np.ndarray:
        """Rows observing attribute `l`."""
        return np.flatnonzero(self.mask[:, l])

    def instance(self, i: int) -> Instance:
        return Instance(self.values[i], self.mask[i])

    def take(self, indices: T.Sequence[int] | np.ndarray) -> "ObservedTable":
        indices = np.asarray(indices, dtype=int)
        return ObservedTable(
            values=self.values[indices],
            mask=self.mask[indices],
            attribute_names=self.attribute_names,
        )

    def with_mask(self, mask: np.ndarray) -> "ObservedTable":
        """Hide more cells. Cells already unobserved cannot be revealed."""
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != self.mask.shape:
            raise ValueError(f"Mask shape {mask.shape} does not match {self.mask.shape}")
        if np.any(mask & ~self.mask):
            raise ValueError("A mask cannot reveal unobserved cells")
        return ObservedTable(
            values=self.values, mask=mask, attribute_names=self.attribute_names
        )

    def with_values(self, values: np.ndarray, mask: np.ndarray) -> "ObservedTable":
        return ObservedTable(
            values=values, mask=mask, attribute_names=self.attribute_names
        )

    def vstack(self, other: "ObservedTable") -> "ObservedTable":
        if other.m != self.m:
            raise ValueError(f"Dimension mismatch: {self.m} vs {other.m} attributes")
        return ObservedTable(
            values=np.vstack([self.values, other.values]),
            mask=np.vstack([self.mask, other.mask]),
            attribute_names=self.attribute_names,
        )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            np.where(self.mask, self.values, np.nan),
            columns=list(self.attribute_names),
        )


class LabeledDataset(pdt.BaseModel):
    """An ObservedTable with one class label per row."""

    model_config = pdt.ConfigDict(frozen=True, arbitrary_types_allowed=True)

    table: ObservedTable
    labels: np.ndarray
    label_name: str = "label"

    @pdt.field_validator("labels", mode="before")
    @classmethod
    def _coerce_labels(cls, labels: T.Any) -> np.ndarray:
        return _frozen(np.array(labels, dtype=str, ndmin=1, copy=True))

    @pdt.model_validator(mode="after")
    def _check_labels(self) -> "LabeledDataset":
        if len(self.labels) != self.table.n:
            raise ValueError(
                f"Expected {self.table.n} labels, got {len(self.labels)}"
            )
        if len(self.labels) == 0:
            raise ValueError("Label set is empty")
        return self

    @property
    def n(self) -> int:
        return self.table.n

    @property
    def classes(self) -> np.ndarray:
        return np.unique(self.labels)

    def subset(self, indices: T.Sequence[int] | np.ndarray) -> "LabeledDataset":
        indices = np.asarray(indices, dtype=int)
        return LabeledDataset(
            table=self.table.take(indices),
            labels=self.labels[indices],
            label_name=self.label_name,
        )

    def with_table(self, table: ObservedTable) -> "LabeledDataset":
        return LabeledDataset(table=table, labels=self.labels, label_name=self.label_name)


# %% LOADERS


def _read_frame(path: str) -> pd.DataFrame:
    text = cpl.AnyPath(path).read_text(encoding="utf-8")
    try:
        frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False)
    except pd.errors.ParserError as e:
        raise ValueError(f"Inconsistent column counts in {path}: {e}") from e
    short_rows = np.flatnonzero(frame.isna().any(axis=1).to_numpy())
    if len(short_rows) > 0:
        raise ValueError(
            f"Inconsistent column counts in {path}: row {short_rows[0] + 1} has too few fields"
        )
    frame.columns = [str(column).strip() for column in frame.columns]
    return frame.apply(lambda column: column.str.strip())


def _parse_cells(
    frame: pd.DataFrame, missing_markers: T.Collection[str], source: str
) -> ObservedTable:
    markers = {marker.strip().lower() for marker in missing_markers}
    missing = frame.apply(lambda column: column.str.lower().isin(markers)).to_numpy()
    numbers = frame.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=float)
    unparseable = np.argwhere(~missing & ~np.isfinite(numbers))
    if len(unparseable) > 0:
        row, column = unparseable[0]
        raise ValueError(
            f"Unparseable cell in {source} at row {row + 1}, "
            f"column '{frame.columns[column]}': {frame.iat[row, column]!r}"
        )
    empty_rows = np.flatnonzero(missing.all(axis=1))
    if len(empty_rows) > 0:
        raise ValueError(
            f"Row {empty_rows[0] + 1} in {source} has no observed attribute"
        )
    return ObservedTable(
        values=numbers, mask=~missing, attribute_names=tuple(frame.columns)
    )


def load_csv(
    path: str,
    missing_markers: T.Collection[str] = MISSING_MARKERS,
    label_column: int | str = -1,
) -> LabeledDataset:
    """
    Load a labeled CSV file whose first row is a header.

    Cells matching one of `missing_markers` (case-insensitive, surrounding blanks
    ignored) are unobserved; the label column defaults to the last one.
    """
    frame = _read_frame(path)
    if isinstance(label_column, int):
        try:
            label_name = frame.columns[label_column]
        except IndexError as e:
            raise ValueError(f"Label column {label_column} out of range in {path}") from e
    elif label_column in frame.columns:
        label_name = label_column
    else:
        raise ValueError(f"Label column '{label_column}' not found in {path}")
    table = _parse_cells(frame.drop(columns=[label_name]), missing_markers, path)
    dataset = LabeledDataset(
        table=table, labels=frame[label_name].to_numpy(), label_name=label_name
    )
    logger.info(
        f"Loaded {path}: n={table.n}, m={table.m}, classes={len(dataset.classes)}, "
        f"missing={table.missing_fraction:.3f}"
    )
    return dataset


def load_table(
    path: str, missing_markers: T.Collection[str] = MISSING_MARKERS
) -> ObservedTable:
    """Load an unlabeled CSV file."""
    return _parse_cells(_read_frame(path), missing_markers, path)


def load_builtin(name: str) -> LabeledDataset:
    """Load one of the scikit-learn bundled datasets (no download needed)."""
    try:
        loader = BUILTIN_LOADERS[name]
    except KeyError as e:
        raise ValueError(
            f"Unknown builtin dataset '{name}', expected one of {sorted(BUILTIN_LOADERS)}"
        ) from e
    bunch = loader()
    table = ObservedTable(
        values=bunch.data,
        mask=np.ones(bunch.data.shape, dtype=bool),
        attribute_names=tuple(str(name) for name in bunch.feature_names),
    )
    return LabeledDataset(table=table, labels=bunch.target_names[bunch.target])


def load_dataset(
    source: str,
    label_column: int | str = -1,
    missing_markers: T.Collection[str] = MISSING_MARKERS,
) -> LabeledDataset:
    if source.startswith(BUILTIN_PREFIX):
        return load_builtin(source.removeprefix(BUILTIN_PREFIX))
    return load_csv(source, missing_markers=missing_markers, label_column=label_column)


# %% WRITERS


def write_csv(data: LabeledDataset | ObservedTable, path: str) -> None:
    """Write with "?" at unobserved cells and 9 significant digits."""
    if isinstance(data, LabeledDataset):
        frame = data.table.to_frame()
        frame[data.label_name] = data.labels
    else:
        frame = data.to_frame()
    text = frame.to_csv(index=False, na_rep=OUTPUT_MARKER, float_format="%.9g")
    any_path = cpl.AnyPath(path)
    any_path.parent.mkdir(parents=True, exist_ok=True)
    any_path.write_text(text, encoding="utf-8")


# %% TRANSFORMS


def zscore_normalize(table: ObservedTable) -> ObservedTable:
    """
    Standardize each attribute over its observed entries (sample std, n-1).

    Attributes with fewer than two observed entries or a zero spread are only
    centered.
    """
    counts = table.mask.sum(axis=0)
    sums = table.filled.sum(axis=0)
    means = np.divide(sums, counts, out=np.zeros(table.m), where=counts > 0)
    centered = np.where(table.mask, table.filled - means, 0.0)
    variances = np.divide(
        (centered**2).sum(axis=0),
        counts - 1,
        out=np.zeros(table.m),
        where=counts > 1,
    )
    stds = np.sqrt(variances)
    scales = np.where(stds > 0, stds, 1.0)
    return table.with_values(centered / scales, table.mask)


def split_indices(
    labels: np.ndarray, test_fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    Sorted (train, test) row indices.

    Stratified by class when every class has at least two rows, plain random
    otherwise.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    _, counts = np.unique(labels, return_counts=True)
    stratify = labels if counts.min() >= 2 else None
    indices = np.arange(len(labels))
    try:
        train, test = train_test_split(
            indices, test_size=test_fraction, random_state=seed, stratify=stratify
        )
    except ValueError as e:
        if stratify is None:
            raise ValueError(f"Cannot split {len(labels)} rows: {e}") from e
        logger.warning(f"Stratified split infeasible ({e}), using a plain random split")
        train, test = train_test_split(indices, test_size=test_fraction, random_state=seed)
    return np.sort(train), np.sort(test)


def split_train_test(
    dataset: LabeledDataset, test_fraction: float, seed: int
) -> tuple[LabeledDataset, LabeledDataset]:
    """Deterministic, disjoint and exhaustive train/test partition of the rows."""
    train, test = split_indices(dataset.labels, test_fraction, seed)
    return dataset.subset(train), dataset.subset(test)
