# %% IMPORTS

import argparse

import cloudpathlib as cpl
import numpy as np
import pandas as pd

from lacuna import configs, methods, settings
from lacuna.core import dataset as ds
from lacuna.core import evaluation
from lacuna.core.enums import ImputationMethod, Mechanism
from lacuna.core.imputation import impute
from lacuna.core.missingness import simulate
from lacuna.core.parameters import MissingnessSpec
from lacuna.experiments import run_experiment
from lacuna.logger import Logger
from lacuna.methods.base import IMPUTATION_SUFFIXES
from lacuna.services import reporter

logger = Logger(__name__)

# %% VARIABLES

UNLABELED: str = "none"
CLUSTER_ALGOS: tuple[str, ...] = ("kmpp-awpd", "scalable-awpd", "kmeans-fwpd", "kmeans-euclid")
CLASSIFY_METHODS: tuple[str, ...] = ("knn-awpd", "knn-fwpd", "knn-pdm", "knn-sdm")

# %% HELPERS


def _label_column(value: str) -> int | str | None:
    if value.lower() == UNLABELED:
        return None
    try:
        return int(value)
    except ValueError:
        return value


def _load(path: str, label_column: int | str | None) -> tuple[ds.ObservedTable, np.ndarray | None]:
    if label_column is None:
        return ds.load_table(path), None
    dataset = ds.load_dataset(path, label_column=label_column)
    return dataset.table, dataset.labels


def _write(table: ds.ObservedTable, labels: np.ndarray | None, path: str) -> None:
    if labels is None:
        ds.write_csv(table, path)
    else:
        ds.write_csv(ds.LabeledDataset(table=table, labels=labels), path)
    logger.info(f"Wrote {path}")


def _write_frame(frame: pd.DataFrame, path: cpl.AnyPath) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(frame.to_csv(index=False, float_format="%.12g"), encoding="utf-8")
    logger.info(f"Wrote {path}")


# %% COMMANDS


def experiment(args: argparse.Namespace) -> None:
    files = [configs.parse_file(file) for file in args.config]
    if len(files) == 0:
        raise RuntimeError("No config provided")
    object_ = configs.unwrap_manifest(configs.to_object(configs.merge_configs(files)))
    if args.output_dir is not None:
        object_["output_dir"] = args.output_dir
    config = settings.ExperimentConfig(**object_)
    report = run_experiment(config)
    paths = reporter.emit_report(report, config.output_dir)
    logger.info(f"Experiment done: {len(report)} records, {len(paths)} files")


def simulate_command(args: argparse.Namespace) -> None:
    table, labels = _load(args.input, _label_column(args.label_column))
    spec = MissingnessSpec(
        mechanism=Mechanism(args.mechanism),
        target_fraction=args.fraction,
        seed=args.seed,
        mar_determinant_fraction=args.determinant_fraction,
        quantile=args.quantile,
    )
    masked = simulate(table, spec)
    logger.info(f"Masked {masked.missing_fraction:.4f} of the cells ({spec.mechanism.value})")
    _write(masked, labels, args.out)


def impute_command(args: argparse.Namespace) -> None:
    table, labels = _load(args.input, _label_column(args.label_column))
    _write(impute(table, ImputationMethod(args.method), k=args.k), labels, args.out)


def cluster(args: argparse.Namespace) -> None:
    table, labels = _load(args.input, _label_column(args.label_column))
    if args.normalize:
        table = ds.zscore_normalize(table)
    method_id = args.algo
    if method_id == "kmeans-euclid":
        method_id = f"{method_id}-after-{IMPUTATION_SUFFIXES[ImputationMethod(args.impute)]}"
    method = methods.build_method(
        method_id,
        beta=args.beta,
        max_iter=args.max_iter,
        imputation_k=args.imputation_k,
    )
    outdir = cpl.AnyPath(args.out_dir)
    for seed in args.seeds:
        state = method.fit_state(table, args.k, seed)
        _write_frame(
            pd.DataFrame({"row": np.arange(table.n), "cluster": state.membership}),
            outdir / f"membership_{seed}.csv",
        )
        _write_frame(
            pd.DataFrame(
                {
                    "iteration": np.arange(
                        state.iteration - len(state.objective_trace) + 1, state.iteration + 1
                    ),
                    "objective": state.objective_trace,
                }
            ),
            outdir / f"objective_{seed}.csv",
        )
        message = f"{method.name} seed={seed}: {state.iteration} iterations, converged={state.converged}"
        if labels is not None:
            accuracy = evaluation.clustering_accuracy(state.membership, labels)
            message += f", accuracy={accuracy:.4f}"
        logger.info(message)


def classify(args: argparse.Namespace) -> None:
    label_column = _label_column(args.label_column)
    if label_column is None:
        raise ValueError("Training data needs a label column")
    train = ds.load_dataset(args.train, label_column=label_column)
    test, truth = _load(args.test, None if args.test_unlabeled else label_column)
    method = methods.build_method(args.method, beta=args.beta, n_neighbors=args.k)
    predictions = method.predict(train, test, args.seed)
    _write_frame(
        pd.DataFrame({"row": np.arange(test.n), train.label_name: predictions}),
        cpl.AnyPath(args.out),
    )
    if truth is not None:
        accuracy = evaluation.classification_accuracy(predictions, truth)
        logger.info(f"{method.name}: accuracy={accuracy:.4f} on {test.n} rows")


def report(args: argparse.Namespace) -> None:
    records = reporter.load_runs(args.runs)
    reporter.CsvReporter().emit_tables(records, args.out)


# %% PARSER


parser = argparse.ArgumentParser(
    prog="lacuna",
    description="Cluster and classify incomplete data, and benchmark missing-data methods",
)
subparsers = parser.add_subparsers(dest="command", required=True)

experiment_parser = subparsers.add_parser("experiment", help="Run a benchmark from YAML configs")
experiment_parser.add_argument(
    "--config", nargs="+", required=True, help="Config or manifest files, merged in order"
)
experiment_parser.add_argument("--output-dir", default=None, help="Override output_dir")
experiment_parser.set_defaults(handler=experiment)


def _add_input(subparser: argparse.ArgumentParser) -> None:
    subparser.add_argument("--input", required=True, help="CSV path or builtin:<name>")
    subparser.add_argument(
        "--label-column",
        default="-1",
        help=f"Label column index or name, '{UNLABELED}' for unlabeled data",
    )


simulate_parser = subparsers.add_parser("simulate", help="Mask a complete dataset")
_add_input(simulate_parser)
simulate_parser.add_argument("--mechanism", choices=[m.value for m in Mechanism], required=True)
simulate_parser.add_argument("--fraction", type=float, default=0.25)
simulate_parser.add_argument("--seed", type=int, default=0)
simulate_parser.add_argument("--quantile", type=float, default=0.5)
simulate_parser.add_argument("--determinant-fraction", type=float, default=0.5)
simulate_parser.add_argument("--out", required=True)
simulate_parser.set_defaults(handler=simulate_command)

impute_parser = subparsers.add_parser("impute", help="Fill the missing cells of a dataset")
_add_input(impute_parser)
impute_parser.add_argument("--method", choices=[m.value for m in ImputationMethod], required=True)
impute_parser.add_argument("--k", type=int, default=5)
impute_parser.add_argument("--out", required=True)
impute_parser.set_defaults(handler=impute_command)

cluster_parser = subparsers.add_parser("cluster", help="Cluster an incomplete dataset")
_add_input(cluster_parser)
cluster_parser.add_argument("--algo", choices=CLUSTER_ALGOS, default="kmpp-awpd")
cluster_parser.add_argument("--k", type=int, required=True)
cluster_parser.add_argument("--beta", type=float, default=None)
cluster_parser.add_argument("--seeds", type=int, nargs="+", default=[0])
cluster_parser.add_argument("--max-iter", type=int, default=100)
cluster_parser.add_argument(
    "--impute",
    choices=[m.value for m in ImputationMethod],
    default=ImputationMethod.ZERO.value,
    help="Imputer run before kmeans-euclid",
)
cluster_parser.add_argument("--imputation-k", type=int, default=5)
cluster_parser.add_argument("--normalize", action="store_true")
cluster_parser.add_argument("--out-dir", required=True)
cluster_parser.set_defaults(handler=cluster)

classify_parser = subparsers.add_parser("classify", help="kNN-classify an incomplete test set")
classify_parser.add_argument("--train", required=True)
classify_parser.add_argument("--test", required=True)
classify_parser.add_argument("--label-column", default="-1")
classify_parser.add_argument("--test-unlabeled", action="store_true")
classify_parser.add_argument("--method", choices=CLASSIFY_METHODS, default="knn-awpd")
classify_parser.add_argument("--k", type=int, default=5)
classify_parser.add_argument("--beta", type=float, default=None)
classify_parser.add_argument("--seed", type=int, default=0)
classify_parser.add_argument("--out", required=True)
classify_parser.set_defaults(handler=classify)

report_parser = subparsers.add_parser("report", help="Aggregate a runs file into tables")
report_parser.add_argument("--runs", required=True)
report_parser.add_argument("--out", required=True)
report_parser.set_defaults(handler=report)

# %% SCRIPTS


def main(argv: list[str] | None = None) -> int:
    args = parser.parse_args(argv)
    configs.load_env()
    try:
        args.handler(args)
    except Exception as e:
        logger.error(f"{args.command} failed: {type(e).__name__}: {e}")
        return 1
    return 0
