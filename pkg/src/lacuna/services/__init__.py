from lacuna.services.reporter import CsvReporter, Reporter, emit_report

__all__ = ["CsvReporter", "Reporter", "emit_report"]
