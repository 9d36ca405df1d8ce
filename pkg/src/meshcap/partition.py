"""Speculative 2-partitioning: low-rate sessions first, high-rate sessions second."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from . import scaling
from .engine import EnginePolicy, SimReport, run_phase
from .grid import Grid
from .phy_mac import PhyParams, SlotSchedule, make_schedule
from .traffic import (RateVector, Session, build_sessions, rates_homogeneous,
                      sample_subset_pairing)


@dataclass(frozen=True)
class SingleOutlier:
    pass


@dataclass(frozen=True)
class OptimalHeavyTail:
    alpha: float


@dataclass(frozen=True)
class FixedM:
    m: int


@dataclass(frozen=True)
class SweepEmpirical:
    pass


PartitionStrategy = Union[SingleOutlier, OptimalHeavyTail, FixedM, SweepEmpirical]


@dataclass(frozen=True)
class PartitionPlan:
    low: frozenset
    high: frozenset

    @property
    def m(self) -> int:
        return len(self.high)

    @property
    def r(self) -> int:
        return len(self.low)


def _sorted_order(lambdas: np.ndarray) -> np.ndarray:
    # ascending by rate, ties by ascending session index
    return np.lexsort((np.arange(len(lambdas)), lambdas))


def optimal_m(n: int, alpha: float) -> int:
    """High-group size n**(alpha/(alpha+2)), rounded and clamped to [1, n-1]."""
    return min(max(int(round(n ** (alpha / (alpha + 2)))), 1), n - 1)


def predicted_throughput(rates: RateVector, m: int) -> float:
    """sum(lambda) / (sqrt(n-m) * lambda_(n-m) + sqrt(m) * lambda_(n)), constants set to 1."""
    lam = np.sort(np.asarray(rates.lambdas, dtype=float))
    n = len(lam)
    if not 1 <= m <= n - 1:
        raise ValueError(f"m must lie in [1, {n - 1}], got {m}")
    return float(lam.sum() / (math.sqrt(n - m) * lam[n - m - 1] + math.sqrt(m) * lam[-1]))


def sweep_m(rates: RateVector) -> int:
    """m in 1..n-1 maximizing :func:`predicted_throughput` (smallest m on ties)."""
    lam = np.sort(np.asarray(rates.lambdas, dtype=float))
    n = len(lam)
    m = np.arange(1, n)
    denom = np.sqrt(n - m) * lam[n - m - 1] + np.sqrt(m) * lam[-1]
    return int(m[np.argmin(denom)])


def plan_partition(rates: RateVector, strategy: PartitionStrategy) -> PartitionPlan:
    n = len(rates)
    if n < 2:
        raise ValueError("partitioning needs at least two sessions")
    if isinstance(strategy, SingleOutlier):
        m = 1
    elif isinstance(strategy, OptimalHeavyTail):
        m = optimal_m(n, strategy.alpha)
    elif isinstance(strategy, FixedM):
        m = strategy.m
    elif isinstance(strategy, SweepEmpirical):
        m = sweep_m(rates)
    else:
        raise TypeError(f"unknown partition strategy {strategy!r}")
    if not 1 <= m <= n - 1:
        raise ValueError(f"partition leaves an empty group (m={m}, n={n})")
    order = _sorted_order(np.asarray(rates.lambdas))
    return PartitionPlan(frozenset(order[: n - m].tolist()), frozenset(order[n - m:].tolist()))


def run_two_phase(grid: Grid, schedule: SlotSchedule, sessions: Sequence[Session],
                  rates: RateVector, plan: PartitionPlan,
                  policy: EnginePolicy = EnginePolicy(),
                  params: Optional[PhyParams] = None) -> SimReport:
    """Low group injects in phase one, high group in phase two; every node relays in both."""
    ids = {s.id for s in sessions}
    if plan.low | plan.high != ids or plan.low & plan.high:
        raise ValueError("plan does not partition the session set")
    if len(rates) != len(sessions):
        raise ValueError("rate vector and session list differ in length")
    phase_policy = replace(policy, pad_dummies=policy.pad_phases)
    low = [s for s in sessions if s.id in plan.low]
    high = [s for s in sessions if s.id in plan.high]
    return SimReport("two-phase", [run_phase(grid, schedule, low, phase_policy, params),
                                   run_phase(grid, schedule, high, phase_policy, params)])


def subgrid_throughput_check(grid: Grid, keep_fractions: Union[float, Sequence[float]],
                             seeds: Sequence[int], base_packets: int = 100,
                             policy: EnginePolicy = EnginePolicy()) -> scaling.ScalingFit:
    """Fit throughput against m for homogeneous traffic among random m-node subsets.

    Non-selected nodes only relay. Each fraction yields one point, the mean
    throughput over `seeds`.
    """
    if np.isscalar(keep_fractions):
        keep_fractions = [keep_fractions]
    schedule = make_schedule(grid)
    points = []
    for f in keep_fractions:
        if not 0 < f <= 1:
            raise ValueError(f"keep_fraction must lie in (0, 1], got {f}")
        m = int(round(f * grid.n))
        if m < 2:
            raise ValueError(f"keep_fraction {f} keeps fewer than 2 nodes")
        tp = [subgrid_throughput(grid, schedule, m, seed, base_packets, policy) for seed in seeds]
        points.append((m, float(np.mean(tp))))
    return scaling.fit_loglog(points)


def subgrid_throughput(grid: Grid, schedule: SlotSchedule, m: int, seed: int,
                       base_packets: int = 100, policy: EnginePolicy = EnginePolicy()) -> float:
    pairing = sample_subset_pairing(grid.n, m, seed)
    sessions = build_sessions(grid, pairing, rates_homogeneous(m), base_packets)
    report = SimReport("conventional", [run_phase(grid, schedule, sessions, policy)])
    return report.throughput


def cell_coverage(grid_side: int, cell_side: int, m: int, trials: int, seed: int) -> float:
    """Fraction of (trial, cell) pairs in which an m-node uniform sample keeps a node in the cell.

    The grid is cut into cell_side x cell_side cells (grid_side must be a multiple).
    """
    if grid_side % cell_side:
        raise ValueError("grid side must be a multiple of the cell side")
    n = grid_side * grid_side
    rng = np.random.default_rng(seed)
    ids = np.arange(n)
    cell_of = (ids // grid_side // cell_side) * (grid_side // cell_side) + (ids % grid_side) // cell_side
    n_cells = (grid_side // cell_side) ** 2
    hit = 0
    for _ in range(trials):
        keep = rng.choice(n, size=m, replace=False)
        hit += np.unique(cell_of[keep]).size
    return hit / (trials * n_cells)
