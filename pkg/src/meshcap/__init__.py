"""Packet-level simulator and scaling-law toolkit for wireless mesh data centers.

Subpackages map onto the build: ``grid`` (mesh and X-Y routing), ``phy_mac``
(channel, SINR, 9-TDMA schedule), ``traffic`` (pairings, rate vectors,
sessions), ``engine`` (slotted simulation), ``partition`` (two-phase
scheduling), ``scaling`` (fits, statistics, order-statistics checks) and
``harness`` (experiment sweeps and reports).
"""

from .engine import BACKEND, EnginePolicy, SimReport, run_conventional, run_phase, throughput_of
from .grid import Coord, Grid, GridSpec, make_grid, square_grid
from .phy_mac import PhyParams, feasible_beta, make_schedule, min_sinr_over_frame, sinr
from .traffic import (build_sessions, rates_heavy_tailed, rates_homogeneous, rates_one_dissimilar,
                      sample_pairing)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "EnginePolicy", "SimReport", "run_conventional", "run_phase", "throughput_of",
    "Coord", "Grid", "GridSpec", "make_grid", "square_grid",
    "PhyParams", "feasible_beta", "make_schedule", "min_sinr_over_frame", "sinr",
    "build_sessions", "rates_heavy_tailed", "rates_homogeneous", "rates_one_dissimilar",
    "sample_pairing",
]
