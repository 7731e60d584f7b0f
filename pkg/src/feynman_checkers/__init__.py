"""Exact and floating evaluation of Feynman's checkerboard amplitudes."""

from .amplitude import (
    Amplitude,
    AmplitudeRow,
    ExactAmplitude,
    amplitude_closed_form,
    amplitude_dp,
    amplitude_down,
    amplitude_edge,
    amplitude_oracle,
    amplitude_row_dp,
)
from .bypass import BypassSet, amplitude_bypass, blocking_check, conservation_bypass, kirchhoff_check
from .errors import (
    CheckersError,
    HypothesisViolation,
    InvalidBypassSet,
    NonBlockingSetError,
    ResourceLimitError,
    UnreachableSiteError,
)
from .lattice import MassParam, RotatedSite, Site, SiteClass, as_mass, classify, from_rotated, to_rotated

__version__ = "0.1.0"

__all__ = [
    "Amplitude",
    "AmplitudeRow",
    "BypassSet",
    "CheckersError",
    "ExactAmplitude",
    "HypothesisViolation",
    "InvalidBypassSet",
    "MassParam",
    "NonBlockingSetError",
    "ResourceLimitError",
    "RotatedSite",
    "Site",
    "SiteClass",
    "UnreachableSiteError",
    "amplitude_bypass",
    "amplitude_closed_form",
    "amplitude_dp",
    "amplitude_down",
    "amplitude_edge",
    "amplitude_oracle",
    "amplitude_row_dp",
    "as_mass",
    "blocking_check",
    "classify",
    "conservation_bypass",
    "from_rotated",
    "kirchhoff_check",
    "to_rotated",
]
