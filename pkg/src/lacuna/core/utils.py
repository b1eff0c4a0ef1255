# %% IMPORTS

import importlib.metadata
import platform

# %% FORMATTING


def format_mean_std(mean: float, std: float, digits: int = 3) -> str:
    """Render an aggregate cell as in the result tables, e.g. 0.800±0.141."""
    return f"{mean:.{digits}f}±{std:.{digits}f}"


# %% SEEDS


def run_seed(base_seed: int, run: int) -> int:
    return base_seed + run


# %% VERSIONS


def package_versions(
    packages: tuple[str, ...] = ("lacuna", "numpy", "scipy", "pandas", "scikit-learn"),
) -> dict[str, str]:
    """Installed versions of the packages a run depends on."""
    versions = {"python": platform.python_version()}
    for package in packages:
        try:
            versions[package] = importlib.metadata.version(package)
        except importlib.metadata.PackageNotFoundError:
            versions[package] = "unknown"
    return versions
