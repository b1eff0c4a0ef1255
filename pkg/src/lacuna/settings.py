# %% IMPORTS

import typing as T

import cloudpathlib as cpl
import pydantic as pdt
import pydantic_settings as pdts

from lacuna import methods
from lacuna.core.dataset import BUILTIN_LOADERS, BUILTIN_PREFIX
from lacuna.core.enums import Mechanism

# %% VARIABLES

DEFAULT_FRACTION: float = 0.25
# quantile ties leave less than a quarter of the cells maskable under MNAR-2
DEFAULT_FRACTIONS: dict[Mechanism, float] = {Mechanism.MNAR2: 0.2}

# %% SETTINGS


class Settings(pdts.BaseSettings):
    """Validated settings; keys missing from the config files come from LACUNA_* variables."""

    model_config = pdts.SettingsConfigDict(
        env_prefix="LACUNA_", frozen=True, extra="forbid"
    )


# %% SOURCES


class DatasetSource(pdt.BaseModel, frozen=True, extra="forbid"):
    """A CSV path or `builtin:<name>` for a scikit-learn bundled dataset."""

    path: str
    name: str | None = None
    label_column: int | str = -1

    @pdt.field_validator("path")
    @classmethod
    def _check_exists(cls, path: str) -> str:
        if path.startswith(BUILTIN_PREFIX):
            builtin = path.removeprefix(BUILTIN_PREFIX)
            if builtin not in BUILTIN_LOADERS:
                raise ValueError(
                    f"Unknown builtin dataset '{builtin}', expected one of {sorted(BUILTIN_LOADERS)}"
                )
        elif not cpl.AnyPath(path).exists():
            raise ValueError(f"Dataset not found: {path}")
        return path

    @property
    def id(self) -> str:
        if self.name:
            return self.name
        if self.path.startswith(BUILTIN_PREFIX):
            return self.path.removeprefix(BUILTIN_PREFIX)
        return cpl.AnyPath(self.path).stem


class MechanismSetting(pdt.BaseModel, frozen=True, extra="forbid"):
    """A mechanism and the missing fractions it is run at (default: 0.25, 0.2 for MNAR-2)."""

    mechanism: Mechanism
    fractions: T.List[T.Annotated[float, pdt.Field(ge=0, lt=1)]] = pdt.Field(..., min_length=1)

    @pdt.model_validator(mode="before")
    @classmethod
    def _default_fractions(cls, data: T.Any) -> T.Any:
        if isinstance(data, dict) and data.get("fractions") is None and "mechanism" in data:
            mechanism = Mechanism(data["mechanism"])
            data = {**data, "fractions": [DEFAULT_FRACTIONS.get(mechanism, DEFAULT_FRACTION)]}
        return data


# %% EXPERIMENTS


class ExperimentConfig(Settings):
    """
    One benchmark: every dataset x mechanism x fraction x run cell runs every method.
    """

    datasets: T.List[DatasetSource] = pdt.Field(..., min_length=1)
    mechanisms: T.List[MechanismSetting] = pdt.Field(
        default_factory=lambda: [MechanismSetting(mechanism=Mechanism.MCAR)],
        min_length=1,
    )
    methods: T.List[str] = pdt.Field(..., min_length=1)
    beta: float | None = pdt.Field(default=None, gt=0, lt=1)
    n_clusters: T.Literal["classes"] | pdt.PositiveInt = "classes"
    n_neighbors: pdt.PositiveInt = 5
    runs: pdt.PositiveInt = 20
    base_seed: pdt.NonNegativeInt = 0
    output_dir: str = "outputs"
    workers: pdt.PositiveInt = 1
    test_fraction: float = pdt.Field(default=0.2, gt=0, lt=1)
    max_iter: pdt.PositiveInt = 100
    imputation_k: pdt.PositiveInt = 5
    quantile: float = pdt.Field(default=0.5, gt=0, lt=1)
    mar_determinant_fraction: float = pdt.Field(default=0.5, gt=0, lt=1)
    normalize: bool = True
    oversample: float | None = pdt.Field(default=None, gt=0)
    rounds: pdt.PositiveInt = 5

    @pdt.field_validator("datasets", mode="before")
    @classmethod
    def _coerce_paths(cls, datasets: T.Any) -> T.Any:
        if isinstance(datasets, list):
            return [{"path": item} if isinstance(item, str) else item for item in datasets]
        return datasets

    @pdt.field_validator("methods")
    @classmethod
    def _resolve_methods(cls, method_ids: T.List[str]) -> T.List[str]:
        resolved = [methods.canonical_id(method_id) for method_id in method_ids]
        duplicates = sorted({m for m in resolved if resolved.count(m) > 1})
        if duplicates:
            raise ValueError(f"Methods listed more than once: {duplicates}")
        return resolved

    @pdt.model_validator(mode="after")
    def _check_unique_datasets(self) -> "ExperimentConfig":
        ids = [source.id for source in self.datasets]
        if len(set(ids)) != len(ids):
            raise ValueError(f"Dataset ids must be unique, got {ids}")
        return self

    def method_options(self) -> dict[str, T.Any]:
        return self.model_dump(
            include={
                "beta",
                "n_neighbors",
                "max_iter",
                "imputation_k",
                "oversample",
                "rounds",
            }
        )
