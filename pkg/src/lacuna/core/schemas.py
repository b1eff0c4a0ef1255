import pandera as pa

RUN_KEYS = ["dataset", "mechanism", "fraction", "method"]
ROW_KEYS = ["dataset", "mechanism", "fraction"]

RunRecordSchema = pa.DataFrameSchema(
    {
        "dataset": pa.Column(str, nullable=False, coerce=True),
        "mechanism": pa.Column(str, nullable=False, coerce=True),
        "fraction": pa.Column(
            float, pa.Check.in_range(0.0, 1.0, include_max=False), coerce=True
        ),
        "method": pa.Column(str, nullable=False, coerce=True),
        "seed": pa.Column(int, nullable=False, coerce=True),
        "accuracy": pa.Column(float, pa.Check.in_range(0.0, 1.0), coerce=True),
    },
    strict=True,
    coerce=True,
)

AggregateSchema = pa.DataFrameSchema(
    {
        "dataset": pa.Column(str, nullable=False, coerce=True),
        "mechanism": pa.Column(str, nullable=False, coerce=True),
        "fraction": pa.Column(float, nullable=False, coerce=True),
        "method": pa.Column(str, nullable=False, coerce=True),
        "runs": pa.Column(int, pa.Check.ge(1), coerce=True),
        "mean": pa.Column(float, pa.Check.in_range(0.0, 1.0), coerce=True),
        "std": pa.Column(float, pa.Check.ge(0.0), coerce=True),
        "best": pa.Column(bool, nullable=False, coerce=True),
    },
    strict=True,
    coerce=True,
)

PlotDataSchema = RunRecordSchema.remove_columns(["dataset"]).add_columns(
    {"run": pa.Column(int, pa.Check.ge(0), coerce=True)}
)
