"""
Missingness simulators for complete tables.

Only the mask changes; values are never altered and every row keeps at least
one observed cell. Each call draws from its own generator seeded by `spec.seed`.
"""

# %% IMPORTS

import math

import numpy as np
from scipy import optimize

from lacuna.core.dataset import ObservedTable
from lacuna.core.enums import Mechanism
from lacuna.core.parameters import MissingnessSpec
from lacuna.logger import Logger

logger = Logger(__name__)

# %% VARIABLES

HIGH_RATE_RATIO: float = 3.0

# %% HELPERS


def _require_complete(table: ObservedTable) -> None:
    if not table.is_complete:
        raise ValueError("Missingness simulation needs a fully observed table")


def _target_count(table: ObservedTable, spec: MissingnessSpec) -> float:
    return spec.target_fraction * table.n * table.m


def _split_attributes(
    m: int, spec: MissingnessSpec, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Seeded split into always-observed determinants and maskable dependents."""
    if m < 2:
        raise ValueError(f"{spec.mechanism.name} needs at least 2 attributes, got {m}")
    size = min(max(round(spec.mar_determinant_fraction * m), 1), m - 1)
    order = rng.permutation(m)
    return np.sort(order[:size]), np.sort(order[size:])


def _above_median(table: ObservedTable, determinants: np.ndarray) -> np.ndarray:
    statistic = table.values[:, determinants].mean(axis=1)
    return statistic > np.median(statistic)


def _value_thresholds(table: ObservedTable, quantile: float) -> np.ndarray:
    return np.quantile(table.values, quantile, axis=0)


def _check_capacity(
    name: str, spec: MissingnessSpec, target: float, maskable: np.ndarray
) -> None:
    """Value ties at the quantile can leave fewer maskable cells than the budget."""
    capacity = int(maskable.sum())
    if target > capacity:
        raise ValueError(
            f"{name} fraction {spec.target_fraction} needs {target:.1f} masked cells, "
            f"but only {capacity} cells lie above the {spec.quantile} value quantile"
        )


def _calibrate(rates: np.ndarray, target: float) -> np.ndarray:
    """Scale relative rates so that the expected masked count equals `target`."""
    positive = rates > 0
    capacity = int(positive.sum())
    if target > capacity:
        raise ValueError(
            f"Target of {target:.1f} masked cells exceeds the {capacity} maskable cells"
        )

    def excess(scale: float) -> float:
        return float(np.minimum(1.0, scale * rates).sum() - target)

    scale = optimize.brentq(excess, 0.0, 1.0 / rates[positive].min())
    return np.minimum(1.0, scale * rates)


def _draw(
    probabilities: np.ndarray, target: float, rng: np.random.Generator
) -> np.ndarray:
    """Bernoulli draw with one resample when the count lands beyond 3 sigma."""
    hidden = rng.random(probabilities.shape) < probabilities
    sigma = math.sqrt(float((probabilities * (1.0 - probabilities)).sum()))
    if abs(hidden.sum() - target) > 3.0 * sigma + 0.5:
        logger.debug(f"Resampling mask: drew {hidden.sum()} cells for {target:.1f}")
        hidden = rng.random(probabilities.shape) < probabilities
    return hidden


def _keep_one_per_row(hidden: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    hidden = hidden.copy()
    for row in np.flatnonzero(hidden.all(axis=1)):
        hidden[row, rng.integers(hidden.shape[1])] = False
    return hidden


# %% MECHANISMS


def apply_mcar(table: ObservedTable, spec: MissingnessSpec) -> ObservedTable:
    """Mask exactly floor(fraction * n * m) uniformly chosen cells."""
    _require_complete(table)
    n, m = table.n, table.m
    target = int(math.floor(_target_count(table, spec) + 1e-9))
    if target == 0:
        return table
    if spec.target_fraction >= (m - 1) / m:
        raise ValueError(
            f"MCAR fraction {spec.target_fraction} leaves some row without an "
            f"observed attribute (limit {(m - 1) / m:.3f})"
        )
    rng = np.random.default_rng(spec.seed)
    hidden = np.zeros(n * m, dtype=bool)
    hidden_per_row = np.zeros(n, dtype=int)
    count = 0
    for cell in rng.permutation(n * m):
        row = cell // m
        if hidden_per_row[row] == m - 1:
            continue
        hidden[cell] = True
        hidden_per_row[row] += 1
        count += 1
        if count == target:
            break
    return table.with_mask(~hidden.reshape(n, m))


def apply_mar(table: ObservedTable, spec: MissingnessSpec) -> ObservedTable:
    """
    Mask dependent attributes at a rate that depends on the determinants.

    Rows whose mean determinant value exceeds the median are masked three times
    as often as the others.
    """
    _require_complete(table)
    target = _target_count(table, spec)
    if target == 0:
        return table
    rng = np.random.default_rng(spec.seed)
    determinants, dependents = _split_attributes(table.m, spec, rng)
    if spec.target_fraction > len(dependents) / table.m:
        raise ValueError(
            f"MAR fraction {spec.target_fraction} exceeds the dependent share "
            f"{len(dependents) / table.m:.3f}"
        )
    row_rates = np.where(_above_median(table, determinants), HIGH_RATE_RATIO, 1.0)
    rates = np.zeros((table.n, table.m))
    rates[:, dependents] = row_rates[:, np.newaxis]
    hidden = _draw(_calibrate(rates, target), target, rng)
    return table.with_mask(~hidden)


def apply_mnar1(table: ObservedTable, spec: MissingnessSpec) -> ObservedTable:
    """Mask cells whose own value lies above the per-attribute quantile."""
    _require_complete(table)
    target = _target_count(table, spec)
    if target == 0:
        return table
    if spec.target_fraction > 1.0 - spec.quantile:
        raise ValueError(
            f"MNAR-1 fraction {spec.target_fraction} exceeds the maskable budget "
            f"{1.0 - spec.quantile:.3f}"
        )
    rng = np.random.default_rng(spec.seed)
    maskable = table.values > _value_thresholds(table, spec.quantile)
    _check_capacity("MNAR-1", spec, target, maskable)
    hidden = _draw(_calibrate(maskable.astype(float), target), target, rng)
    return table.with_mask(~_keep_one_per_row(hidden, rng))


def apply_mnar2(table: ObservedTable, spec: MissingnessSpec) -> ObservedTable:
    """
    Combine both dependencies: dependent cells above their value quantile are
    maskable, at the determinant-driven rates of `apply_mar`.
    """
    _require_complete(table)
    target = _target_count(table, spec)
    if target == 0:
        return table
    rng = np.random.default_rng(spec.seed)
    determinants, dependents = _split_attributes(table.m, spec, rng)
    budget = len(dependents) / table.m * (1.0 - spec.quantile)
    if spec.target_fraction > budget + 1e-12:
        raise ValueError(
            f"MNAR-2 fraction {spec.target_fraction} exceeds the maskable budget {budget:.3f}"
        )
    maskable = np.zeros((table.n, table.m), dtype=bool)
    thresholds = _value_thresholds(table, spec.quantile)
    maskable[:, dependents] = table.values[:, dependents] > thresholds[dependents]
    _check_capacity("MNAR-2", spec, target, maskable)
    row_rates = np.where(_above_median(table, determinants), HIGH_RATE_RATIO, 1.0)
    rates = maskable * row_rates[:, np.newaxis]
    hidden = _draw(_calibrate(rates, target), target, rng)
    return table.with_mask(~hidden)


SIMULATORS = {
    Mechanism.MCAR: apply_mcar,
    Mechanism.MAR: apply_mar,
    Mechanism.MNAR1: apply_mnar1,
    Mechanism.MNAR2: apply_mnar2,
}


def simulate(table: ObservedTable, spec: MissingnessSpec) -> ObservedTable:
    masked = SIMULATORS[spec.mechanism](table, spec)
    logger.debug(
        f"Simulated {spec.mechanism.value} at {spec.target_fraction}: "
        f"realized {masked.missing_fraction:.4f}"
    )
    return masked
