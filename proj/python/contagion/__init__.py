"""Stress-testing engine for interdependent bank networks.

Thin wrapper over the compiled core: reconstruction of bilateral exposure
networks from marginals, network statistics, cascade simulation, and the full
file-to-report pipeline.
"""

import json as _json

from ._core import (
    CascadeResult,
    Error,
    IoError,
    NetworkStats,
    NumericError,
    ValidationError,
    __version__,
    apply_shock,
    core_periphery_fit,
    count_links,
    failure_thresholds,
    interdependency_matrix,
    marginal_check,
    network_statistics,
    reconstruct_anan,
    reconstruct_hala,
    reconstruct_maxe,
    run_cascade,
)
from ._core import run_pipeline as _run_pipeline_json

__all__ = [
    "CascadeResult",
    "Error",
    "IoError",
    "NetworkStats",
    "NumericError",
    "ValidationError",
    "__version__",
    "apply_shock",
    "core_periphery_fit",
    "count_links",
    "failure_thresholds",
    "interdependency_matrix",
    "marginal_check",
    "network_statistics",
    "reconstruct_anan",
    "reconstruct_hala",
    "reconstruct_maxe",
    "run_cascade",
    "run_pipeline",
]


def run_pipeline(banks, output_dir, **kwargs):
    """Run ingest -> reconstruct -> calibrate -> cascade grid -> reports.

    Writes report.json, network_stats.csv, and hierarchies.csv into
    ``output_dir`` and returns the report as a dict. Keyword arguments mirror
    the CLI flags: scenario, methods, thetas, betas, seed, ensemble,
    threshold_basis, link_threshold, exports.
    """
    if kwargs.get("scenario") is not None:
        kwargs["scenario"] = str(kwargs["scenario"])
    return _json.loads(_run_pipeline_json(str(banks), str(output_dir), **kwargs))
