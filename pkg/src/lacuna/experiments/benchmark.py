# %% IMPORTS

import asyncio
import typing as T

import pydantic as pdt

from lacuna import methods
from lacuna.core import evaluation, utils
from lacuna.core.dataset import LabeledDataset, load_dataset, split_indices, zscore_normalize
from lacuna.core.enums import Mechanism, Task
from lacuna.core.missingness import simulate
from lacuna.core.models import ExperimentReport, RunRecord
from lacuna.core.parameters import MissingnessSpec
from lacuna.logger import Logger
from lacuna.settings import ExperimentConfig

logger = Logger(__name__)

# %% TYPES


class Cell(T.NamedTuple):
    """One simulated table: every method of the experiment runs on it."""

    dataset: str
    mechanism: Mechanism
    fraction: float
    run: int


# %% BENCHMARK


class Benchmark(pdt.BaseModel, frozen=True, extra="forbid"):
    config: ExperimentConfig

    _datasets: dict[str, LabeledDataset] = pdt.PrivateAttr(default_factory=dict)
    _methods: list[methods.MethodKind] = pdt.PrivateAttr(default_factory=list)

    def __enter__(self) -> "Benchmark":
        """
        Load and normalize the datasets and build the methods.
        """
        for source in self.config.datasets:
            dataset = load_dataset(source.path, label_column=source.label_column)
            if not dataset.table.is_complete:
                raise ValueError(
                    f"Dataset '{source.id}' already has missing values; "
                    "benchmarks simulate missingness on complete data"
                )
            if self.config.normalize:
                dataset = dataset.with_table(zscore_normalize(dataset.table))
            self._datasets[source.id] = dataset
            logger.info(
                f"Loaded dataset '{source.id}': {dataset.n} rows, "
                f"{dataset.table.m} attributes, {len(dataset.classes)} classes"
            )
        options = self.config.method_options()
        self._methods[:] = [
            methods.build_method(method_id, **options) for method_id in self.config.methods
        ]
        return self

    def __exit__(
        self,
        exc_type: T.Type[BaseException],
        exc_value: BaseException,
        traceback: T.Any,
    ) -> None:
        self._datasets.clear()
        self._methods.clear()

    def cells(self) -> list[Cell]:
        return [
            Cell(dataset_id, setting.mechanism, fraction, run)
            for dataset_id in self._datasets
            for setting in self.config.mechanisms
            for fraction in setting.fractions
            for run in range(self.config.runs)
        ]

    def _n_clusters(self, dataset: LabeledDataset) -> int:
        if self.config.n_clusters == "classes":
            return len(dataset.classes)
        return int(self.config.n_clusters)

    def _score(
        self,
        method: methods.MethodKind,
        dataset: LabeledDataset,
        masked: LabeledDataset,
        seed: int,
    ) -> float:
        if method.TASK == Task.CLUSTERING:
            partition = method.fit_predict(masked.table, self._n_clusters(dataset), seed)
            return evaluation.clustering_accuracy(partition, dataset.labels)
        train_rows, test_rows = split_indices(
            dataset.labels, self.config.test_fraction, seed
        )
        train, test = masked.subset(train_rows), masked.subset(test_rows)
        predictions = method.predict(train, test.table, seed)
        return evaluation.classification_accuracy(predictions, test.labels)

    def run_cell(self, cell: Cell) -> list[RunRecord]:
        """Simulate missingness once, then score every method on the same table."""
        dataset = self._datasets[cell.dataset]
        seed = utils.run_seed(self.config.base_seed, cell.run)
        spec = MissingnessSpec(
            mechanism=cell.mechanism,
            target_fraction=cell.fraction,
            seed=seed,
            mar_determinant_fraction=self.config.mar_determinant_fraction,
            quantile=self.config.quantile,
        )
        context = (
            f"dataset={cell.dataset}, mechanism={cell.mechanism.value}, "
            f"fraction={cell.fraction}, seed={seed}"
        )
        try:
            masked = dataset.with_table(simulate(dataset.table, spec))
        except Exception as e:
            logger.error(f"Missingness simulation failed ({context}): {e}")
            raise RuntimeError(f"Missingness simulation failed ({context})") from e
        records = []
        for method in self._methods:
            try:
                accuracy = self._score(method, dataset, masked, seed)
            except Exception as e:
                logger.error(f"Method {method.name} failed ({context}): {e}")
                raise RuntimeError(f"Method {method.name} failed ({context})") from e
            records.append(
                RunRecord(
                    dataset=cell.dataset,
                    mechanism=cell.mechanism.value,
                    fraction=cell.fraction,
                    method=method.name,
                    seed=seed,
                    accuracy=accuracy,
                )
            )
        logger.info(
            f"Cell done ({context}): "
            + ", ".join(f"{r.method}={r.accuracy:.3f}" for r in records)
        )
        return records

    async def _run_limited(self, cell: Cell, semaphore: asyncio.Semaphore) -> list[RunRecord]:
        async with semaphore:
            return await asyncio.to_thread(self.run_cell, cell)

    async def run(self) -> ExperimentReport:
        """
        Run every cell, at most `workers` at a time.

        Records come back in cell order whatever the completion order.
        """
        if not self._datasets:
            raise RuntimeError("Benchmark must be entered before it runs")
        cells = self.cells()
        logger.info(
            f"Running {len(cells)} cells x {len(self._methods)} methods "
            f"with {self.config.workers} worker(s)"
        )
        semaphore = asyncio.Semaphore(self.config.workers)
        results = await asyncio.gather(
            *(self._run_limited(cell, semaphore) for cell in cells)
        )
        records = [record for records in results for record in records]
        return ExperimentReport(
            records=records, config=self.config.model_dump(mode="json")
        )


# %% RUNNERS


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    with Benchmark(config=config) as benchmark:
        return asyncio.run(benchmark.run())
