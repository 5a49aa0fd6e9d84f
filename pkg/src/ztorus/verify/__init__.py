"""Randomized and exhaustive verification of the quantitative estimates."""

from .blocks import (ZetaLattice, BlockSample, EstimateReport, lattice_for,
                     sample_block, trilinear_functional, verify_estimate,
                     DEFAULT_SWEEPS, ESTIMATE_IDS, EPS_PLUS)
from .geometry import covering_count, ellipse_gap_check, SUBGRID
from .acsweep import AlmostConservationReport, almost_conservation_sweep

__all__ = [
    "ZetaLattice", "BlockSample", "EstimateReport", "lattice_for",
    "sample_block", "trilinear_functional", "verify_estimate",
    "DEFAULT_SWEEPS", "ESTIMATE_IDS", "EPS_PLUS",
    "covering_count", "ellipse_gap_check", "SUBGRID",
    "AlmostConservationReport", "almost_conservation_sweep",
]
