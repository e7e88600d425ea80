"""Locally sparse varying coefficient estimation for asynchronous longitudinal data."""

from ._core import (
    Dataset,
    Domain,
    Fit,
    LockerError,
    SplineBasis,
    benchmark,
    default_bandwidth,
    fit,
    scad,
    scad_deriv,
    simulate,
    true_beta,
)

__all__ = [
    "Dataset",
    "Domain",
    "Fit",
    "LockerError",
    "SplineBasis",
    "benchmark",
    "default_bandwidth",
    "fit",
    "scad",
    "scad_deriv",
    "simulate",
    "true_beta",
]
