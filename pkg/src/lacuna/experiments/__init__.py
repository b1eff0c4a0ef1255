from lacuna.experiments.benchmark import Benchmark, Cell, run_experiment

__all__ = ["Benchmark", "Cell", "run_experiment"]
