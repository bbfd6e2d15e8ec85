"""Staged prior-data conflict checks for the balanced normal-normal model."""

import json as _json

from ._core import (
    Dataset,
    HyperPrior,
    PriorcheckError,
    PValueResult,
    __version__,
    calibrate_json,
    check_model,
    check_pi1,
    check_pi2,
    check_simple,
    compute_residuals,
    compute_t,
    compute_v,
    helmert_basis,
    ks_statistic,
    mc_pvalue,
    run_protocol_json,
    sample_t_given_v,
    sample_unit_sphere,
)


def run_protocol(data, sigma2, prior, **kwargs):
    """Run the model -> pi2 -> pi1 protocol and return the report as a dict."""
    return _json.loads(run_protocol_json(data, sigma2, prior, **kwargs))


def calibrate(stage, sigma2, groups, per_group, discrepancy, **kwargs):
    """Calibration result for one stage as a dict."""
    return _json.loads(
        calibrate_json(stage, sigma2, groups, per_group, discrepancy, **kwargs)
    )


__all__ = [
    "Dataset",
    "HyperPrior",
    "PriorcheckError",
    "PValueResult",
    "calibrate",
    "check_model",
    "check_pi1",
    "check_pi2",
    "check_simple",
    "compute_residuals",
    "compute_t",
    "compute_v",
    "helmert_basis",
    "ks_statistic",
    "mc_pvalue",
    "run_protocol",
    "sample_t_given_v",
    "sample_unit_sphere",
]
