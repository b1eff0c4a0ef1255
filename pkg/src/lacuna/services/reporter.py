# %% IMPORTS

import abc
import io
import typing as T

import cloudpathlib as cpl
import pandas as pd
import pydantic as pdt

from lacuna import configs
from lacuna.core import evaluation, utils
from lacuna.core.models import ExperimentReport, RunRecord
from lacuna.core.schemas import PlotDataSchema, RunRecordSchema
from lacuna.logger import Logger

logger = Logger(__name__)

# %% VARIABLES

RUNS_FILE: str = "runs.csv"
MANIFEST_FILE: str = "manifest.yml"

# %% HELPERS


def _write_text(path: cpl.AnyPath, text: str) -> str:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        logger.error(f"Cannot write {path}: {e}")
        raise
    logger.info(f"Wrote {path}")
    return str(path)


def load_runs(path: str) -> list[RunRecord]:
    """Read back a runs file written by a reporter."""
    text = cpl.AnyPath(path).read_text(encoding="utf-8")
    frame = RunRecordSchema.validate(pd.read_csv(io.StringIO(text), comment="#"))
    return [RunRecord(**row) for row in frame.to_dict(orient="records")]


# %% REPORTERS


class Reporter(abc.ABC, pdt.BaseModel, frozen=True):
    KIND: str

    @abc.abstractmethod
    def emit_tables(self, records: T.Sequence[RunRecord], outdir: str) -> list[str]:
        raise NotImplementedError("Subclasses must implement `emit_tables`.")

    @abc.abstractmethod
    def emit(self, report: ExperimentReport, outdir: str) -> list[str]:
        raise NotImplementedError("Subclasses must implement `emit`.")


class CsvReporter(Reporter, frozen=True):
    """
    Aggregate tables (one per mechanism), long-format plot data (one per dataset),
    every run record and a manifest to rerun the experiment.
    """

    KIND: T.Literal["Csv"] = "Csv"

    float_format: str = "%.10g"

    def _csv(self, frame: pd.DataFrame) -> str:
        return frame.to_csv(index=False, float_format=self.float_format)

    def emit_tables(self, records, outdir):
        if len(records) == 0:
            raise ValueError("Cannot emit an empty report")
        aggregates = evaluation.aggregate_runs(records)
        paths = []
        for mechanism, table in aggregates.groupby("mechanism", sort=True):
            table = table.assign(
                cell=[
                    utils.format_mean_std(mean, std)
                    for mean, std in zip(table["mean"], table["std"])
                ]
            )
            text = f"# {evaluation.CLUSTERING_SCORE_NOTE}\n" + self._csv(table)
            path = cpl.AnyPath(outdir) / f"table_{mechanism}.csv"
            paths.append(_write_text(path, text))
        return paths

    def emit(self, report, outdir):
        if len(report) == 0:
            raise ValueError("Cannot emit an empty report")
        paths = self.emit_tables(report.records, outdir)
        runs = evaluation.records_frame(report.records)
        paths.append(_write_text(cpl.AnyPath(outdir) / RUNS_FILE, self._csv(runs)))
        base_seed = int(report.config.get("base_seed", 0))
        plot = runs.assign(run=runs["seed"] - base_seed)
        for dataset, frame in plot.groupby("dataset", sort=True):
            frame = PlotDataSchema.validate(
                frame[["mechanism", "fraction", "method", "run", "seed", "accuracy"]]
            )
            path = cpl.AnyPath(outdir) / f"plot_{dataset}.csv"
            paths.append(_write_text(path, self._csv(frame)))
        manifest = {"config": report.config, "versions": utils.package_versions()}
        manifest_path = str(cpl.AnyPath(outdir) / MANIFEST_FILE)
        try:
            configs.write_file(manifest_path, manifest)
        except OSError as e:
            logger.error(f"Cannot write {manifest_path}: {e}")
            raise
        paths.append(manifest_path)
        return paths

# %% RUNNERS


def emit_report(
    report: ExperimentReport, outdir: str, reporter: Reporter | None = None
) -> list[str]:
    """Write every report artifact under `outdir`; returns the written paths."""
    return (reporter or CsvReporter()).emit(report, outdir)
