import os

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from lacuna.core import discrepancy as dc
from lacuna.core.dataset import Instance, ObservedTable


def _instance(*values: float) -> Instance:
    array = np.array(values, dtype=float)
    return Instance(array, np.isfinite(array))


def _random_table(seed: int, n: int = 200, m: int = 5, observed: float = 0.7) -> ObservedTable:
    rng = np.random.default_rng(seed)
    mask = rng.random((n, m)) < observed
    mask[np.arange(n), rng.integers(m, size=n)] = True
    return ObservedTable(values=rng.normal(size=(n, m)), mask=mask)


P1, P2, P3 = _instance(np.nan, 5.0), _instance(2.0, 3.0), _instance(3.0, 6.0)

# %% MEASURES


def test_observed_distance_complete() -> None:
    assert dc.observed_distance(_instance(1.0, 5.0), P2) == pytest.approx(
        np.sqrt(5)
    ), "Distance to (2, 3) should be sqrt(5)!"
    assert dc.observed_distance(_instance(1.0, 5.0), P3) == pytest.approx(
        np.sqrt(5)
    ), "Distance to (3, 6) should be sqrt(5)!"


def test_observed_distance_shared_attributes_only() -> None:
    assert dc.observed_distance(P1, P2) == 2.0, "Only x1 should count!"
    assert (
        dc.observed_distance(P1, _instance(2.0, np.nan)) == 0.0
    ), "No shared attribute, no distance!"


def test_pdm_values() -> None:
    assert dc.pdm(P1, P2) == 2.5, "PDM should add the missing fraction to the distance!"
    assert dc.pdm(P1, P3) == 1.5, "PDM should add the missing fraction to the distance!"
    assert dc.pdm(P2, P2) == 0.0, "PDM of a complete point to itself should be zero!"


def test_sdm_values() -> None:
    assert abs(dc.sdm(P1, P2) - 2.12) <= 0.005, "SDM(P1, P2) should round to 2.12!"
    assert abs(dc.sdm(P1, P3) - 1.22) <= 0.005, "SDM(P1, P3) should round to 1.22!"
    assert dc.sdm(P1, P2) == pytest.approx(np.sqrt(4.5)), "SDM(P1, P2) should be sqrt(4.5)!"
    assert dc.sdm(P3, P3) == 0.0, "SDM of a complete point to itself should be zero!"


def test_dimension_mismatch() -> None:
    with pytest.raises(ValueError, match="Dimension mismatch"):
        dc.observed_distance(P1, _instance(1.0, 2.0, 3.0))


# %% FITTING


def test_fit_worked_example(worked_table: ObservedTable) -> None:
    model = dc.fit_discrepancy_model(worked_table, beta=0.25)
    assert model.weights == pytest.approx((2 / 3, 1.0)), "Weights are observed shares!"
    assert model.weight_sum == pytest.approx(5 / 3), "Weight sum should be cached!"
    assert model.d_max == pytest.approx(np.sqrt(10)), "d_max should be the (2,3)-(3,6) distance!"


def test_fit_complete_table(iris) -> None:
    model = dc.fit_discrepancy_model(iris.table)
    assert model.weights == (1.0, 1.0, 1.0, 1.0), "Complete data should weigh every attribute 1!"
    assert model.beta == 0.1, "Complete data should clamp beta to 0.1!"
    diffs = iris.table.values[:, None, :] - iris.table.values[None, :, :]
    assert model.d_max == pytest.approx(
        np.sqrt((diffs**2).sum(axis=2)).max()
    ), "d_max should be the Iris diameter!"


def test_fit_identical_rows_guard() -> None:
    table = ObservedTable(values=[[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]])
    assert (
        dc.fit_discrepancy_model(table, beta=0.2).d_max == 1.0
    ), "A zero diameter should fall back to 1!"


@pytest.mark.parametrize(
    "kwargs, message",
    [
        ({"beta": 0.0}, "beta"),
        ({"beta": 1.0}, "beta"),
        ({"weights": [1.0]}, "Expected 2 weights"),
        ({"weights": [0.0, 0.0]}, "All attribute weights are zero"),
    ],
)
def test_fit_rejects_parameters(worked_table: ObservedTable, kwargs, message) -> None:
    with pytest.raises(ValueError, match=message):
        dc.fit_discrepancy_model(worked_table, **kwargs)


def test_fit_needs_two_rows() -> None:
    with pytest.raises(ValueError, match="at least 2 instances"):
        dc.fit_discrepancy_model(ObservedTable(values=[[1.0, 2.0]]))


@pytest.mark.parametrize(
    "fraction, expected", [(0.0, 0.1), (0.2, 0.2), (0.5, 0.25)]
)
def test_default_beta(fraction: float, expected: float) -> None:
    hidden = np.zeros(90, dtype=bool)
    hidden[: int(fraction * 100)] = True
    mask = np.ones((10, 10), dtype=bool)
    mask[:, :9] = ~hidden.reshape(10, 9)
    table = ObservedTable(values=np.ones((10, 10)), mask=mask)
    assert table.missing_fraction == pytest.approx(fraction), "Table setup is off!"
    assert dc.default_beta(table) == pytest.approx(
        expected
    ), f"Default beta at {fraction} missing should be {expected}!"


# %% PENALTY AND AWPD


def test_penalty_values(worked_table: ObservedTable) -> None:
    model = dc.fit_discrepancy_model(worked_table, beta=0.25)
    assert dc.penalty(P2, P3, model) == 0.0, "Complete pairs should carry no penalty!"
    assert dc.penalty(P1, P2, model) == pytest.approx(0.4), "x0 weight share should be 0.4!"
    assert dc.penalty(P1, _instance(2.0, np.nan), model) == pytest.approx(
        1.0
    ), "Disjoint observed sets should carry the full penalty!"


def test_penalty_grows_when_a_shared_attribute_is_hidden() -> None:
    table = _random_table(3)
    model = dc.fit_discrepancy_model(table, beta=0.2)
    rng = np.random.default_rng(4)
    checked = 0
    for i, j in rng.integers(table.n, size=(2_000, 2)):
        a, b = table.instance(i), table.instance(j)
        shared = np.flatnonzero(a.mask & b.mask)
        if len(shared) == 0 or b.mask.sum() < 2:
            continue
        l = rng.choice(shared)
        mask = b.mask.copy()
        mask[l] = False
        hidden = Instance(np.where(mask, b.values, np.nan), mask)
        before, after = dc.penalty(a, b, model), dc.penalty(a, hidden, model)
        assert after == pytest.approx(
            before + model.weights[l] / model.weight_sum
        ), f"Hiding attribute {l} should add its weight share!"
        assert after > before, "Penalty should strictly grow!"
        checked += 1
    assert checked > 500, f"Too few usable pairs: {checked}!"


def test_awpd_worked_example(worked_table: ObservedTable) -> None:
    model = dc.fit_discrepancy_model(worked_table, beta=0.25)
    expected = 0.75 * 2 / np.sqrt(10) + 0.25 * 0.4
    assert dc.awpd(P1, P2, model) == pytest.approx(expected), "AWPD should mix both parts!"
    assert dc.awpd(P1, P2, model) == pytest.approx(0.5743, abs=1e-4), "AWPD should be 0.5743!"
    assert dc.awpd(P2, P2, model) == 0.0, "A complete point should be at zero from itself!"


def test_awpd_properties_on_random_instances() -> None:
    table = _random_table(0)
    model = dc.fit_discrepancy_model(table, beta=0.2)
    pairs = np.random.default_rng(0).integers(table.n, size=(10_000, 2))
    for i, j in pairs:
        a, b = table.instance(i), table.instance(j)
        forward = dc.awpd(a, b, model)
        assert forward == dc.awpd(b, a, model), "AWPD should be symmetric!"
        assert dc.awpd(a, a, model) <= forward, "Self discrepancy should be the smallest!"
        assert 0.0 <= dc.penalty(a, b, model) <= 1.0, "Penalty should lie in [0, 1]!"


@pytest.mark.parametrize("beta", [0.1, 0.25, 0.6])
def test_awpd_complete_data_reduction(beta: float) -> None:
    values = np.random.default_rng(5).normal(size=(80, 6))
    table = ObservedTable(values=values)
    model = dc.fit_discrepancy_model(table, beta=beta)
    expected = (1.0 - beta) * cdist(values, values) / model.d_max
    matrix = dc.pairwise_discrepancy(table, model)
    assert matrix == pytest.approx(
        expected, rel=1e-12, abs=1e-15
    ), "On complete data AWPD should be the scaled Euclidean distance for every pair!"


def test_awpd_complete_data_reduction_on_iris(iris) -> None:
    model = dc.fit_discrepancy_model(iris.table, beta=0.25)
    expected = 0.75 * cdist(iris.table.values, iris.table.values) / model.d_max
    assert dc.pairwise_discrepancy(iris.table, model) == pytest.approx(
        expected, rel=1e-12, abs=1e-15
    ), "Every Iris pair should reduce to the scaled Euclidean distance!"


def test_pairwise_matches_single_pairs(worked_table: ObservedTable) -> None:
    model = dc.fit_discrepancy_model(worked_table, beta=0.25)
    matrix = dc.pairwise_discrepancy(worked_table, model)
    assert matrix.shape == (3, 3), "Matrix should be n x n!"
    assert np.array_equal(matrix, matrix.T), "Matrix should be symmetric!"
    assert matrix[0, 1] == dc.awpd(P1, P2, model), "Matrix entries should match awpd!"


def test_alternative_measures_share_the_protocol(worked_table: ObservedTable) -> None:
    for measure in [dc.ObservedEuclidean(), dc.PartialDistance(), dc.SentencedDistance()]:
        rows = measure.to_table(P1, worked_table)
        assert rows[1] == measure.between(
            P1, P2
        ), f"{type(measure).__name__} rows should match single pairs!"


# %% PERSISTENCE


def test_save_then_load_model(tmp_path, worked_table: ObservedTable) -> None:
    model = dc.fit_discrepancy_model(worked_table, beta=0.25)
    path = os.path.join(tmp_path, "model.yml")
    dc.save_model(model, path)
    loaded = dc.load_model(path)
    assert loaded.weights == model.weights, "Weights should survive a save!"
    assert loaded.beta == model.beta, "Beta should survive a save!"
    assert loaded.d_max == model.d_max, "d_max should survive a save!"


def test_model_rejects_negative_weights() -> None:
    with pytest.raises(ValueError, match="non-negative"):
        dc.DiscrepancyModel(weights=(1.0, -0.5), beta=0.2, d_max=1.0)
