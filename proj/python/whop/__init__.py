"""Finite sections of multi-dimensional Wiener-Hopf operators with
discontinuous symbols: spectral traces, two-term asymptotic coefficients and
declarative experiment sweeps. Thin wrapper over the C++ core."""

import json as _json

from ._core import (  # noqa: F401
    ConfigError,
    DiscreteOperator,
    Domain,
    FitResult,
    GuardError,
    Prediction,
    Resolution,
    Symbol,
    TestFunction,
    TorusGrid,
    assemble_dense,
    assemble_torus,
    coeff_A,
    coeff_A_quadrature,
    fit_log_coefficient,
    norm_estimate,
    predict,
    projection_kernel,
    regularized_trace_diff,
    resolve_config_path,
    run_config_json,
    symmetrize,
    trace_norm,
    trace_poly,
    trace_smooth,
    w0_geometry,
    w1_geometry,
)


def run_config(config_text):
    """Run an experiment config (the same format the CLI consumes) and return
    the report as a dict."""
    return _json.loads(run_config_json(config_text))


def run_preset(name):
    """Run a bundled preset (e.g. 'landau_widom_1d') by name."""
    with open(resolve_config_path(name)) as f:
        return run_config(f.read())
