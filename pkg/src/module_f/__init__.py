"""
Module F: Experiments
Driven-dissipative curves, density scans, breakpoint estimation,
continuous-time evolution and the comparison of initial-state families.
"""

from .schema import (
    BreakpointComparison,
    BreakpointEstimate,
    CurvePoint,
    DriveCurve,
    DrivePath,
    EventKind,
    FamilyComparison,
    GillespieEvent,
    GillespieTrace,
    ScanPoint,
    ScanResult,
    UniversalityReport,
)
from .drive import batch_drive, drive, one_by_one_drive, placed_configuration, placement_sites
from .scan import density_scan, doubled
from .breakpoint import breakpoint_of, estimate_zeta_c, fit_breakpoint
from .gillespie import fixation_matches_stabilization, gillespie_run, site_rate, total_rate
from .universality import compare_breakpoints, compare_points, universality_compare

__all__ = [
    'BreakpointComparison', 'BreakpointEstimate', 'CurvePoint', 'DriveCurve', 'DrivePath',
    'EventKind',
    'FamilyComparison', 'GillespieEvent', 'GillespieTrace', 'ScanPoint', 'ScanResult',
    'UniversalityReport',
    'batch_drive', 'drive', 'one_by_one_drive', 'placed_configuration', 'placement_sites',
    'density_scan', 'doubled',
    'breakpoint_of', 'estimate_zeta_c', 'fit_breakpoint',
    'fixation_matches_stabilization', 'gillespie_run', 'site_rate', 'total_rate',
    'compare_breakpoints', 'compare_points', 'universality_compare',
]
