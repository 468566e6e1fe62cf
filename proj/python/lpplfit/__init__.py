"""Log-periodic power law calibration toolkit."""

from ._core import (
    Error,
    FitResult,
    LinearParams,
    NonlinearParams,
    TimeSeries,
    ValidationError,
    Window,
    fit_window,
    from_decimal_years,
    generate,
    lppl_value,
    moving_average,
    objective,
    parse_csv,
    parse_csv_file,
    run_ensemble,
    slave_linear,
    slice,
    tc_quantiles,
    to_decimal_years,
)

__version__ = "0.1.0"

__all__ = [
    "Error",
    "FitResult",
    "LinearParams",
    "NonlinearParams",
    "TimeSeries",
    "ValidationError",
    "Window",
    "fit_window",
    "from_decimal_years",
    "generate",
    "lppl_value",
    "moving_average",
    "objective",
    "parse_csv",
    "parse_csv_file",
    "run_ensemble",
    "slave_linear",
    "slice",
    "tc_quantiles",
    "to_decimal_years",
    "__version__",
]
