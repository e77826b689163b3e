"""Exact evaluation of Szpiro-type bounds on theta-data descriptors, with brute-force
oracles for the local-field lemmas behind them."""

from .arith import LogSum, LogValue, compare
from .errors import DescriptorError, DomainError, SzpiroError
from .global_model import ThetaDataDescriptor, parse_descriptor, serialize
from .szpiro import (InequalityReport, all_reports, baby_report, derive_constants, eps_l, explicit_report,
                     probabilistic_report, tautological_report)

__version__ = "0.1.0"

__all__ = [
    "DescriptorError", "DomainError", "InequalityReport", "LogSum", "LogValue", "SzpiroError",
    "ThetaDataDescriptor", "all_reports", "baby_report", "compare", "derive_constants", "eps_l",
    "explicit_report", "parse_descriptor", "probabilistic_report", "serialize", "tautological_report",
]
