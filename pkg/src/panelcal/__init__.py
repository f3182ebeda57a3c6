"""Calibrated multi-reviewer decision stack.

Aggregates rubric review panels into consensus scores, bounds the
misclassification risk of thresholded decisions, calibrates thresholds
against human decisions, makes Bayesian credible accept/reject calls,
and validates the whole stack with a deterministic Monte-Carlo harness.
"""

from . import aggregate, bayes, bounds, calibrate, core, metrics, records, simulate

__version__ = "0.1.0"

__all__ = [
    "aggregate",
    "bayes",
    "bounds",
    "calibrate",
    "core",
    "metrics",
    "records",
    "simulate",
    "__version__",
]
