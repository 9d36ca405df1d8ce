"""Source/destination pairings, demand-rate vectors and per-session workloads."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import Grid

DEFAULT_BASE_PACKETS = 100

# independent RNG streams derived from one replication seed
_PAIRING_STREAM = 1
_RATES_STREAM = 2
_SUBSET_STREAM = 3


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), stream])


@dataclass(frozen=True)
class Pairing:
    """Session ``i`` runs from ``sources[i]`` to ``dests[i]``."""

    sources: np.ndarray
    dests: np.ndarray

    def __len__(self):
        return len(self.sources)

    @property
    def dest(self) -> dict[int, int]:
        return {int(s): int(d) for s, d in zip(self.sources, self.dests)}


def _derangement(k: int, rng: np.random.Generator) -> np.ndarray:
    idx = np.arange(k)
    while True:
        perm = rng.permutation(k)
        if not np.any(perm == idx):
            return perm


def sample_pairing(n: int, rng_seed: int) -> Pairing:
    """Uniform random derangement of ``0..n-1``: every node sources and sinks one session."""
    if n < 2:
        raise ValueError(f"a pairing needs at least 2 nodes, got {n}")
    perm = _derangement(n, stream_rng(rng_seed, _PAIRING_STREAM))
    return Pairing(np.arange(n), perm)


def sample_subset_pairing(n: int, m: int, rng_seed: int) -> Pairing:
    """Derangement over a uniformly chosen m-subset of the ``n`` nodes."""
    if m < 2:
        raise ValueError(f"a pairing needs at least 2 nodes, got {m}")
    if m > n:
        raise ValueError(f"cannot keep {m} of {n} nodes")
    nodes = np.sort(stream_rng(rng_seed, _SUBSET_STREAM).choice(n, size=m, replace=False))
    perm = _derangement(m, stream_rng(rng_seed, _PAIRING_STREAM))
    return Pairing(nodes, nodes[perm])


@dataclass(frozen=True)
class RateVector:
    kind: str  # "homogeneous" | "one-dissimilar" | "heavy-tailed"
    lambdas: np.ndarray
    param: Optional[float] = None  # g_exponent or alpha
    eta: str = "eta_n"  # symbolic; absorbed into base_packets

    def __len__(self):
        return len(self.lambdas)


def rates_homogeneous(n: int) -> RateVector:
    return RateVector("homogeneous", np.ones(n))


def rates_one_dissimilar(n: int, g_exponent: float) -> RateVector:
    if n < 2:
        raise ValueError("one-dissimilar rates need n >= 2")
    if not 0 < g_exponent < 1:
        raise ValueError(f"g_exponent must lie in (0, 1), got {g_exponent}")
    lam = np.ones(n)
    lam[-1] = float(n) ** g_exponent
    return RateVector("one-dissimilar", lam, g_exponent)


def pareto_inverse_cdf(u, alpha: float):
    """Inverse of F(x) = 1 - x**-alpha on x >= 1."""
    return np.asarray(u, dtype=float) ** (-1.0 / alpha)


def rates_heavy_tailed(n: int, alpha: float, rng_seed: int) -> RateVector:
    if not alpha > 1:
        raise ValueError(f"alpha must exceed 1 (finite mean), got {alpha}")
    rng = stream_rng(rng_seed, _RATES_STREAM)
    u = 1.0 - rng.random(n)  # uniform on (0, 1]
    return RateVector("heavy-tailed", pareto_inverse_cdf(u, alpha), alpha)


def workload(rates: RateVector, base_packets: int = DEFAULT_BASE_PACKETS) -> np.ndarray:
    if base_packets < 1:
        raise ValueError("base_packets must be >= 1")
    # the 1e-9 guard keeps exact products such as 100 * 64**(2/3) from rounding up
    scaled = base_packets * np.asarray(rates.lambdas, dtype=float)
    return np.ceil(scaled - 1e-9).astype(np.int64)


@dataclass(frozen=True)
class Session:
    id: int
    src: int
    dst: int
    path: tuple
    packets: int

    @property
    def hops(self) -> int:
        return len(self.path) - 1


def build_sessions(grid: Grid, pairing: Pairing, rates: RateVector,
                   base_packets: int = DEFAULT_BASE_PACKETS) -> list[Session]:
    if len(pairing) != len(rates):
        raise ValueError(f"{len(pairing)} sessions but {len(rates)} rates")
    packets = workload(rates, base_packets)
    sessions = []
    for i, (s, d) in enumerate(zip(pairing.sources, pairing.dests)):
        s, d = int(s), int(d)
        if s == d:
            raise ValueError(f"session {i} has source equal to destination")
        sessions.append(Session(i, s, d, grid.xy_route(s, d), int(packets[i])))
    return sessions
