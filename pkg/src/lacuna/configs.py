import os
import typing as T

import omegaconf as oc
import cloudpathlib as cpl
from dotenv import load_dotenv

from lacuna.logger import Logger

logger = Logger(__name__)

# %% TYPES

Config = oc.DictConfig | oc.ListConfig

# %% PARSERS


def parse_file(path: str) -> Config:
    any_path = cpl.AnyPath(path)
    text: str = any_path.read_text()
    return oc.OmegaConf.create(text)


def parse_string(string: str) -> Config:
    return oc.OmegaConf.create(string)


# %% MERGERS


def merge_configs(configs: T.Sequence[Config]) -> Config:
    return oc.OmegaConf.merge(*configs)


# %% CONVERTERS


def to_object(config: Config, resolve: bool = True) -> object:
    return oc.OmegaConf.to_container(config, resolve=resolve)


def to_yaml(values: T.Mapping[str, T.Any]) -> str:
    return oc.OmegaConf.to_yaml(oc.OmegaConf.create(dict(values)))


# %% WRITERS


def write_file(path: str, values: T.Mapping[str, T.Any]) -> None:
    any_path = cpl.AnyPath(path)
    any_path.parent.mkdir(parents=True, exist_ok=True)
    any_path.write_text(to_yaml(values))
    logger.info(f"Config written to {path}")


# %% MANIFESTS


def unwrap_manifest(object_: T.Any) -> T.Any:
    """
    Return the experiment config held by a run manifest, or the object itself.

    Manifests carry the config under `config` next to a `versions` mapping.
    """
    if isinstance(object_, dict) and "config" in object_ and "versions" in object_:
        return object_["config"]
    return object_


# %% ENVIRONMENT


def load_env(path: str = ".env") -> bool:
    """
    Load environment variables (e.g. LACUNA_RUNS, LACUNA_LOG_LEVEL) from a dotenv file.
    """
    if not os.path.exists(path):
        logger.debug(f"{path} does not exist, using the process environment only")
        return False
    return load_dotenv(dotenv_path=path)
