import numpy as np
import pytest

from lacuna.core import imputation as im
from lacuna.core.dataset import ObservedTable
from lacuna.core.enums import ImputationMethod

# %% WORKED EXAMPLE


@pytest.mark.parametrize(
    "method, fill",
    [
        (ImputationMethod.ZERO, 0.0),
        (ImputationMethod.MEAN, 2.5),
        (ImputationMethod.KNN, 3.0),
    ],
)
def test_worked_example_fills(worked_table: ObservedTable, method, fill: float) -> None:
    completed = im.impute(worked_table, method, k=1)
    assert completed.is_complete, "Imputation should leave no gap!"
    assert completed.values.tolist() == [[fill, 5.0], [2.0, 3.0], [3.0, 6.0]], "Fill is off!"


@pytest.mark.parametrize("method", list(ImputationMethod))
def test_complete_input_is_unchanged(iris, method) -> None:
    completed = im.impute(iris.table, method)
    assert np.array_equal(completed.values, iris.table.values), "Complete data should pass through!"


# %% EDGE CASES


def test_zero_fills_fully_masked_column() -> None:
    table = ObservedTable(values=[[np.nan, 1.0], [np.nan, 2.0]])
    assert im.impute_zero(table).values[:, 0].tolist() == [0.0, 0.0], "Zeros fill any column!"


def test_mean_constant_column() -> None:
    table = ObservedTable(values=[[np.nan, 1.0], [4.0, 2.0], [4.0, 3.0]])
    assert im.impute_mean(table).values[0, 0] == 4.0, "Mean of a constant is the constant!"


@pytest.mark.parametrize("method", [ImputationMethod.MEAN, ImputationMethod.KNN])
def test_attribute_observed_nowhere(method) -> None:
    table = ObservedTable(values=[[np.nan, 1.0], [np.nan, 2.0]])
    with pytest.raises(ValueError, match="observed nowhere"):
        im.impute(table, method)


def test_knn_with_large_k_is_the_observer_mean() -> None:
    table = ObservedTable(
        values=[[np.nan, 0.0], [1.0, 1.0], [2.0, 5.0], [6.0, 2.0], [np.nan, 3.0]]
    )
    completed = im.impute_knn(table, k=10)
    assert completed.values[0, 0] == pytest.approx(3.0), "Large k averages every observer!"
    assert completed.values[4, 0] == pytest.approx(3.0), "Large k averages every observer!"


def test_knn_ties_go_to_lower_rows() -> None:
    # rows 1 and 2 are both at distance 1 from row 0
    table = ObservedTable(values=[[np.nan, 0.0], [10.0, 1.0], [20.0, -1.0]])
    assert im.impute_knn(table, k=1).values[0, 0] == 10.0, "Ties should pick the lower row!"


def test_knn_rejects_k() -> None:
    with pytest.raises(ValueError, match="k must be at least 1"):
        im.impute_knn(ObservedTable(values=[[1.0]]), k=0)


def test_observed_cells_never_change() -> None:
    rng = np.random.default_rng(1)
    values = rng.normal(size=(50, 4))
    mask = rng.random((50, 4)) > 0.25
    mask[:, 0] = True
    table = ObservedTable(values=values, mask=mask)
    for method in ImputationMethod:
        completed = im.impute(table, method, k=3)
        assert (
            np.array_equal(completed.values[mask], table.values[mask])
        ), f"{method} changed observed cells!"
