"""Equiangular tight frames and a numerical certificate for the Singer-Zauner gap."""

__version__ = "0.1.0"

from .admissibility import AdmissibilityVerdict, check_pair, scan_table
from .constructions import (
    DifferenceSet,
    brute_force_difference_sets,
    harmonic_etf,
    naimark_complement,
    simplex_etf,
    singer_difference_set,
)
from .frame import Frame
from .gap_certificate import GapCertificateReport, certify
from .verification import EtfParameters, etf_params, verify_frame, welch_bound

__all__ = [
    "AdmissibilityVerdict",
    "DifferenceSet",
    "EtfParameters",
    "Frame",
    "GapCertificateReport",
    "brute_force_difference_sets",
    "certify",
    "check_pair",
    "etf_params",
    "harmonic_etf",
    "naimark_complement",
    "scan_table",
    "simplex_etf",
    "singer_difference_set",
    "verify_frame",
    "welch_bound",
]
