"""Kantorovich neural network operators in Orlicz spaces."""

from ._core import (
    Function,
    HypothesisNotMet,
    Kernel,
    NotInOrliczSpace,
    NotInWeakClass,
    NumericalFailure,
    Phi,
    PotentiallyInfinite,
    apply,
    corpus_catalog,
    error_curve,
    kernel_catalog,
    luxemburg_norm,
    modular,
    moment,
    phi_catalog,
)

__all__ = [
    "Function",
    "HypothesisNotMet",
    "Kernel",
    "NotInOrliczSpace",
    "NotInWeakClass",
    "NumericalFailure",
    "Phi",
    "PotentiallyInfinite",
    "apply",
    "corpus_catalog",
    "error_curve",
    "kernel_catalog",
    "luxemburg_norm",
    "modular",
    "moment",
    "phi_catalog",
]
