"""LoS channel, SINR evaluation and the 9-TDMA spatial-reuse schedule.

The mesh is tiled into 3x3 cells. Inside a cell node labels run 1..9 in
row-major order; a node may transmit only in slots whose index maps to its
label, ``label == slot % 9 + 1``. Same-label nodes sit three grid units apart,
so interference stays bounded for path-loss exponents above 2.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

import numpy as np

from .grid import Grid

FRAME_LEN = 9

DEFAULT_GAMMA = 4.0
DEFAULT_POWER = 1.0
DEFAULT_NOISE = 1e-6


@dataclass(frozen=True)
class PhyParams:
    """Transmit power, noise power, SINR threshold and path-loss exponent.

    ``beta`` may be left unset; experiments then certify one from the
    schedule (see :func:`certified_beta`).
    """

    power: float = DEFAULT_POWER
    noise: float = DEFAULT_NOISE
    beta: Optional[float] = None
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self):
        if not self.power > 0:
            raise ValueError("power must be positive")
        if not self.noise > 0:
            raise ValueError("noise must be positive")
        if self.beta is not None and not self.beta > 0:
            raise ValueError("beta must be positive")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")

    def with_beta(self, beta: float) -> "PhyParams":
        return replace(self, beta=beta)


def channel_power_gain(distance: float, params: PhyParams) -> float:
    """|h|^2 = d^-gamma; the random phase of the LoS gain drops out of the power."""
    if not distance > 0:
        raise ValueError(f"distance must be positive, got {distance}")
    return float(distance) ** (-params.gamma)


def sinr(grid: Grid, tx: int, rx: int, concurrent, params: PhyParams) -> float:
    """SINR at `rx` for a transmission from `tx` while every node in `concurrent` transmits.

    Interference is summed as received power. `tx` may appear in `concurrent`;
    it is excluded from the interferer set.
    """
    if tx == rx:
        raise ValueError("receiver must differ from transmitter")
    others = [k for k in concurrent if k != tx]
    if rx in others:
        raise ValueError(f"receiver {rx} is itself transmitting")
    signal = params.power * channel_power_gain(grid.distance(tx, rx), params)
    interference = 0.0
    if others:
        k = np.asarray(others)
        r0, c0 = grid.coord(rx)
        d = grid.spacing * np.hypot(grid.row_array[k] - r0, grid.col_array[k] - c0)
        interference = params.power * float(np.sum(d ** (-params.gamma)))
    return signal / (params.noise + interference)


@dataclass(frozen=True)
class SlotSchedule:
    labels: np.ndarray  # label in 1..9 per node id
    frame_len: int = FRAME_LEN

    def label(self, node: int) -> int:
        return int(self.labels[node])

    def label_of_slot(self, slot: int) -> int:
        return slot % self.frame_len + 1

    def active_set(self, slot: int) -> np.ndarray:
        if slot < 0:
            raise ValueError("slot index must be non-negative")
        return np.flatnonzero(self.labels == self.label_of_slot(slot))

    def active_sets(self) -> list[np.ndarray]:
        return [self.active_set(s) for s in range(self.frame_len)]


def make_schedule(grid: Grid) -> SlotSchedule:
    """Row-major 3x3 cell labels; partial border cells reuse the same formula."""
    labels = 3 * ((grid.row_array - 1) % 3) + ((grid.col_array - 1) % 3) + 1
    labels = labels.astype(np.int32)
    labels.setflags(write=False)
    return SlotSchedule(labels)


def _interference_at(grid: Grid, senders: np.ndarray, params: PhyParams) -> Callable:
    rows = grid.row_array[senders].astype(float)
    cols = grid.col_array[senders].astype(float)

    def at(r: float, c: float, exclude: int) -> float:
        d2 = (rows - r) ** 2 + (cols - c) ** 2
        d2[exclude] = np.inf
        return params.power * float(np.sum((grid.spacing ** 2 * d2) ** (-params.gamma / 2)))

    return at


ReceiverRule = Union[str, Callable[[int], int]]


def min_sinr_over_frame(grid: Grid, schedule: SlotSchedule, params: PhyParams,
                        receiver_rule: ReceiverRule = "worst") -> float:
    """Smallest SINR over every (slot, active transmitter, receiver) in one frame.

    With ``receiver_rule="worst"`` each transmitter is paired with the
    neighbor that collects the most interference; a callable maps a
    transmitter id to its receiver instead. Every same-label node is assumed
    to transmit. Transmitters with no neighbor are skipped.
    """
    signal = params.power * channel_power_gain(grid.spacing, params)
    best = np.inf
    for senders in schedule.active_sets():
        if senders.size == 0:
            continue
        interference_at = _interference_at(grid, senders, params)
        rows = grid.row_array[senders]
        cols = grid.col_array[senders]
        if receiver_rule == "worst":
            # vectorized: interference at every receiver candidate of every sender
            rr = grid.row_array.astype(float)
            cc = grid.col_array.astype(float)
            d2 = (rr[:, None] - rows[None, :]) ** 2 + (cc[:, None] - cols[None, :]) ** 2
            with np.errstate(divide="ignore"):
                gains = (grid.spacing ** 2 * d2.astype(float)) ** (-params.gamma / 2)
            gains[d2 == 0] = 0.0
            total = params.power * gains.sum(axis=1)
            for j, tx in enumerate(senders):
                nbrs = list(grid.neighbors(int(tx)))
                if not nbrs:
                    continue
                # the intended transmitter does not interfere with itself
                own = params.power * gains[nbrs, j]
                worst = np.max(total[nbrs] - own)
                best = min(best, signal / (params.noise + worst))
        else:
            for j, tx in enumerate(senders):
                rx = int(receiver_rule(int(tx)))
                if not grid.is_adjacent(int(tx), rx):
                    raise ValueError(f"receiver {rx} is not a neighbor of {tx}")
                r, c = grid.coord(rx)
                worst = interference_at(r, c, j)
                best = min(best, signal / (params.noise + worst))
    return float(best)


def feasible_beta(grid: Grid, schedule: SlotSchedule, params: PhyParams) -> float:
    """Largest threshold every scheduled one-hop transmission is certified to meet."""
    if not params.gamma > 2:
        raise ValueError("bounded interference requires gamma > 2")
    return min_sinr_over_frame(grid, schedule, params)


def certified_beta(grid: Grid, schedule: SlotSchedule, params: PhyParams,
                   margin: float = 0.5) -> float:
    return margin * feasible_beta(grid, schedule, params)
