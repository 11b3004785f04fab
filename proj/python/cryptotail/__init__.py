"""Power-law tail estimation for high-frequency trade data."""

from ._core import (
    CorrelationResult,
    DataError,
    Error,
    ExchangeDataset,
    GofResult,
    IngestError,
    NumericError,
    RegressionResult,
    TailFit,
    bonferroni_adjust,
    empirical_ccdf,
    fit_tail,
    fixture_returns,
    hill_estimate,
    ingest_file,
    ks_statistic,
    log_returns,
    make_dataset,
    make_tail,
    normal_cdf,
    ols_fit,
    pearson_test,
    regression_estimate,
    run_cli,
    sample_pareto,
    select_xmin,
    gof_test,
    standardized_returns,
    student_t_cdf,
)

__all__ = [name for name in dir() if not name.startswith("_")]
