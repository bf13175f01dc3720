"""Option pricing estimators (Black-Scholes, interpolation, kernel regression, variance gamma)
and the train/test evaluation harness."""

from ._pricelab import (
    DEFAULT_SEED,
    DailyChain,
    DomainError,
    Estimator,
    PricelabError,
    VgParams,
    bs_price,
    dividend_curve,
    evaluate,
    format_chains,
    gamma_expectation,
    implied_dividend,
    implied_vol,
    iv_dividend_sensitivity,
    load_chains,
    parse_chains,
    run_cli,
    synth,
    vg_calibrate,
    vg_price,
    vg_price_mc,
)

__all__ = [name for name in dir() if not name.startswith("_")]
