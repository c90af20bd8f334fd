"""Cox reduction and likelihood-ratio confidence sets of models."""

from ._coxred import (
    BudgetExceeded,
    ConfigError,
    CoxredError,
    DataError,
    NumericalError,
    build_confidence_set,
    chisq_cdf,
    chisq_quantile,
    cox_reduce,
    generate,
    lambda_max,
    lasso,
    lasso_undertuned_support,
    lrt,
    marginal_screen,
    wald,
)

__all__ = [
    "BudgetExceeded",
    "ConfigError",
    "CoxredError",
    "DataError",
    "NumericalError",
    "build_confidence_set",
    "chisq_cdf",
    "chisq_quantile",
    "cox_reduce",
    "generate",
    "lambda_max",
    "lasso",
    "lasso_undertuned_support",
    "lrt",
    "marginal_screen",
    "wald",
]
