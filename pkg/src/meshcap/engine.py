"""Slotted packet-level simulation of backlogged sessions over the 9-TDMA mesh.

Semantics of one slot ``t``: every node whose label equals ``t % 9 + 1`` and
whose output queue is nonempty forwards its head packet one hop along that
packet's X-Y path. Queues are FIFO by arrival; all source packets arrive at
``t = 0`` in ascending session order. A phase ends in the slot that delivers
the last real packet, so ``slots_elapsed`` is that slot index plus one.

In the conventional scheme finished sessions keep sending dummy packets:
with ``pad_dummies`` every session is topped up to the largest workload, so
the whole network is served at the rate the heaviest session needs. Only real
packets count toward delivery and throughput. ``pad_phases`` applies the same
padding inside each phase of the two-phase scheme; by default finished
sessions there simply go idle.

The slot loop runs in the compiled ``_kernel`` extension when it is importable
and in ``_pykernel`` otherwise (or when ``MESHCAP_PURE=1``). Verified-SINR
mode and packet tracing always use the Python kernel.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _pykernel
from .grid import Grid
from .phy_mac import PhyParams, SlotSchedule, sinr
from .traffic import Session

try:
    from . import _kernel
except ImportError:  # extension not built
    _kernel = None

BACKEND = "cython" if _kernel is not None and os.environ.get("MESHCAP_PURE") != "1" else "python"

ASSUMED = "assumed"
VERIFIED = "verified"

DEFAULT_MAX_SLOTS = 10 ** 9


class NonTerminationError(RuntimeError):
    """Raised when a phase has not delivered every packet within ``max_slots``."""


@dataclass(frozen=True)
class EnginePolicy:
    sinr_mode: str = ASSUMED
    max_slots: int = DEFAULT_MAX_SLOTS
    pad_dummies: bool = True
    pad_phases: bool = False
    backend: Optional[str] = None  # None follows the module-level BACKEND

    def __post_init__(self):
        if self.max_slots <= 0:
            raise ValueError("max_slots must be positive")
        if self.sinr_mode not in (ASSUMED, VERIFIED):
            raise ValueError(f"unknown sinr_mode {self.sinr_mode!r}")
        if self.backend not in (None, "cython", "python"):
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass
class PhaseResult:
    slots_elapsed: int
    delivered: np.ndarray
    completion_slot: np.ndarray
    dropped: int = 0
    session_ids: tuple = ()
    transmissions: int = 0

    @property
    def packets(self) -> int:
        return int(self.delivered.sum())


@dataclass
class SimReport:
    scheme: str  # "conventional" | "two-phase"
    phases: list = field(default_factory=list)

    @property
    def total_packets(self) -> int:
        return sum(ph.packets for ph in self.phases)

    @property
    def total_slots(self) -> int:
        return sum(ph.slots_elapsed for ph in self.phases)

    @property
    def throughput(self) -> float:
        return throughput_of(self)


def throughput_of(report: SimReport) -> float:
    """Real packets delivered per slot over all phases."""
    slots = report.total_slots
    if slots <= 0:
        raise ValueError("report covers zero slots")
    return report.total_packets / slots


def _flatten(sessions: Sequence[Session], pad: bool):
    lengths = np.fromiter((len(s.path) for s in sessions), dtype=np.int64, count=len(sessions))
    path_off = np.zeros(len(sessions) + 1, dtype=np.int64)
    np.cumsum(lengths, out=path_off[1:])
    path_nodes = np.fromiter((v for s in sessions for v in s.path), dtype=np.int32,
                             count=int(path_off[-1]))
    real = np.fromiter((s.packets for s in sessions), dtype=np.int64, count=len(sessions))
    total = np.full_like(real, real.max()) if pad else real.copy()
    return path_nodes, path_off, real, total


class TraceWriter:
    """Collects ``slot,tx,rx,session,packet`` rows; ``session`` is the session id."""

    header = ("slot", "tx", "rx", "session", "packet")

    def __init__(self):
        self.rows = []

    def __call__(self, slot, tx, rx, session, packet):
        self.rows.append((slot, tx, rx, session, packet))

    def write(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.header)
            w.writerows(self.rows)


def run_phase(grid: Grid, schedule: SlotSchedule, sessions: Sequence[Session],
              policy: EnginePolicy = EnginePolicy(), params: Optional[PhyParams] = None,
              trace: Optional[TraceWriter] = None) -> PhaseResult:
    if not sessions:
        raise ValueError("a phase needs at least one session")
    for s in sessions:
        if s.packets < 1:
            raise ValueError(f"session {s.id} has no packets")
        if s.src == s.dst:
            raise ValueError(f"session {s.id} has source equal to destination")
    path_nodes, path_off, real, total = _flatten(sessions, policy.pad_dummies)
    labels = np.ascontiguousarray(schedule.labels, dtype=np.int32)

    verify = None
    if policy.sinr_mode == VERIFIED:
        if params is None or params.beta is None:
            raise ValueError("verified mode needs PhyParams with beta set")
        verify = _make_verifier(grid, params)

    backend = policy.backend or BACKEND
    ids = tuple(s.id for s in sessions)
    sid_trace = None
    if trace is not None:
        sid_trace = lambda t, tx, rx, s, j: trace(t, tx, rx, ids[s], j)  # noqa: E731

    if backend == "cython" and _kernel is not None and verify is None and trace is None:
        out = _kernel.run_slots(labels, schedule.frame_len, path_nodes, path_off,
                                real, total, policy.max_slots)
    else:
        out = _pykernel.run_slots(labels, schedule.frame_len, path_nodes, path_off,
                                  real, total, policy.max_slots, trace=sid_trace, verify=verify)
    status, slots, delivered, completion, transmissions, retries = out
    if status != 0:
        raise NonTerminationError(
            f"phase did not finish within max_slots={policy.max_slots} "
            f"({int(delivered.sum())}/{int(real.sum())} packets delivered)")
    return PhaseResult(int(slots), delivered, completion, int(retries), ids, int(transmissions))


def _make_verifier(grid: Grid, params: PhyParams):
    def verify(txs, rxs):
        return [sinr(grid, tx, rx, txs, params) >= params.beta for tx, rx in zip(txs, rxs)]
    return verify


def run_conventional(grid: Grid, schedule: SlotSchedule, sessions: Sequence[Session],
                     policy: EnginePolicy = EnginePolicy(),
                     params: Optional[PhyParams] = None) -> SimReport:
    """All sessions inject concurrently in a single phase."""
    return SimReport("conventional", [run_phase(grid, schedule, sessions, policy, params)])
