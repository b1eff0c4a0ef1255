# %% IMPORTS

from pydantic import BaseModel, Field

from lacuna.core.enums import Mechanism


# %% MISSINGNESS PARAMS


class MissingnessSpec(BaseModel, frozen=True):
    """
    Parameters of one missingness simulation.
    """

    mechanism: Mechanism = Field(..., description="Missingness mechanism.")
    target_fraction: float = Field(
        default=0.25,
        description="Fraction of all n x m cells to mask.",
        ge=0,
        lt=1,
    )
    seed: int = Field(default=0, description="Seed of the random stream.")
    mar_determinant_fraction: float = Field(
        default=0.5,
        description="Share of attributes kept observed as determinants (MAR, MNAR-2).",
        gt=0,
        lt=1,
    )
    quantile: float = Field(
        default=0.5,
        description="Per-attribute value quantile above which cells are maskable (MNAR).",
        gt=0,
        lt=1,
    )

