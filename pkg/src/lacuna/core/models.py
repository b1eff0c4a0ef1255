# %% IMPORTS

import typing as T

import pydantic as pdt


# %% RUNS


class RunRecord(pdt.BaseModel, frozen=True):
    dataset: str
    mechanism: str
    fraction: float = pdt.Field(..., ge=0, lt=1)
    method: str
    seed: int
    accuracy: float = pdt.Field(..., ge=0, le=1)


# %% REPORTS


class ExperimentReport(pdt.BaseModel, frozen=True):
    records: T.List[RunRecord]
    config: T.Dict[str, T.Any] = pdt.Field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)
