import os

import pydantic as pdt
import pytest

from lacuna import configs, settings
from lacuna.core.enums import Mechanism

CONF_DIR = os.path.join(os.path.dirname(__file__), "conf")


def test_valid_config() -> None:
    object_ = configs.to_object(configs.parse_file(os.path.join(CONF_DIR, "valid.yml")))
    config = settings.ExperimentConfig(**object_)
    assert (
        [source.id for source in config.datasets] == ["iris", "toy"]
    ), "Dataset ids should be parsed!"
    assert config.methods == [
        "kmpp-awpd",
        "kmeans-euclid-after-zi",
    ], "Method ids should be canonical!"
    assert config.mechanisms[0].mechanism == Mechanism.MCAR, "First mechanism should be MCAR!"
    assert config.n_clusters == "classes", "n_clusters should follow the classes!"
    assert config.runs == 2, "Runs should come from the file!"


def test_invalid_config() -> None:
    object_ = configs.to_object(configs.parse_file(os.path.join(CONF_DIR, "invalid.yml")))
    with pytest.raises(pdt.ValidationError):
        settings.ExperimentConfig(**object_)


@pytest.mark.parametrize(
    "changes, message",
    [
        ({"runs": 0}, "runs"),
        ({"methods": []}, "methods"),
        ({"methods": ["kmedoids"]}, "Unknown method"),
        ({"methods": ["zi", "kmeans-euclid-after-zi"]}, "more than once"),
        ({"datasets": ["missing/file.csv"]}, "Dataset not found"),
        ({"datasets": ["builtin:mnist"]}, "Unknown builtin dataset"),
        ({"unknown_key": 1}, "unknown_key"),
        ({"n_clusters": "auto"}, "n_clusters"),
    ],
)
def test_config_invariants(changes: dict, message: str) -> None:
    values = {"datasets": ["builtin:iris"], "methods": ["kmpp-awpd"], **changes}
    with pytest.raises(pdt.ValidationError, match=message):
        settings.ExperimentConfig(**values)


def test_environment_fills_missing_keys(monkeypatch) -> None:
    monkeypatch.setenv("LACUNA_RUNS", "7")
    monkeypatch.setenv("LACUNA_BASE_SEED", "3")
    config = settings.ExperimentConfig(datasets=["builtin:iris"], methods=["zi"], runs=4)
    assert config.runs == 4, "Explicit values should win over the environment!"
    assert config.base_seed == 3, "Missing keys should come from the environment!"


def test_dataset_ids_must_be_unique() -> None:
    with pytest.raises(pdt.ValidationError, match="unique"):
        settings.ExperimentConfig(
            datasets=["builtin:iris", {"path": "builtin:wine", "name": "iris"}],
            methods=["zi"],
        )


def test_method_options() -> None:
    config = settings.ExperimentConfig(
        datasets=["builtin:iris"], methods=["zi"], beta=0.2, n_neighbors=3
    )
    options = config.method_options()
    assert options["beta"] == 0.2, "Beta should be a method option!"
    assert options["n_neighbors"] == 3, "n_neighbors should be a method option!"
    assert "runs" not in options, "Runs are not a method option!"


@pytest.mark.parametrize(
    "mechanism, expected",
    [("mcar", [0.25]), ("mar", [0.25]), ("mnar1", [0.25]), ("mnar2", [0.2])],
)
def test_mechanism_default_fractions(mechanism: str, expected: list[float]) -> None:
    setting = settings.MechanismSetting(mechanism=mechanism)
    assert setting.fractions == expected, f"Default fractions for {mechanism} are off!"


def test_mechanism_explicit_fractions() -> None:
    setting = settings.MechanismSetting(mechanism="mnar2", fractions=[0.05, 0.1])
    assert setting.fractions == [0.05, 0.1], "Explicit fractions should be kept!"
    with pytest.raises(pdt.ValidationError, match="fractions"):
        settings.MechanismSetting(mechanism="mcar", fractions=[])


def test_default_mechanism_is_mcar() -> None:
    config = settings.ExperimentConfig(datasets=["builtin:iris"], methods=["zi"])
    assert [(s.mechanism, s.fractions) for s in config.mechanisms] == [
        (Mechanism.MCAR, [0.25])
    ], "Default mechanism should be MCAR at 0.25!"
