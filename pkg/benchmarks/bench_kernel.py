"""Compare the compiled and pure-Python slot kernels on identical workloads.

    python benchmarks/bench_kernel.py [--sides 6 12 18] [--packets 100] [--repeat 3]
"""

import argparse
import time

from meshcap import engine
from meshcap.engine import EnginePolicy, run_phase
from meshcap.grid import square_grid
from meshcap.phy_mac import make_schedule
from meshcap.traffic import build_sessions, rates_homogeneous, sample_pairing


def _best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sides", type=int, nargs="+", default=[6, 12, 18])
    ap.add_argument("--packets", type=int, default=100)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if engine._kernel is None:
        raise SystemExit("compiled kernel not built; reinstall without MESHCAP_NO_EXT")

    print(f"{'n':>6} {'slots':>8} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for L in args.sides:
        g = square_grid(L)
        sched = make_schedule(g)
        sessions = build_sessions(g, sample_pairing(g.n, 0), rates_homogeneous(g.n), args.packets)
        runs = {}
        for backend in ("python", "cython"):
            policy = EnginePolicy(backend=backend)
            runs[backend] = _best_of(lambda: run_phase(g, sched, sessions, policy), args.repeat)
        (tp, rp), (tc, rc) = runs["python"], runs["cython"]
        assert rp.slots_elapsed == rc.slots_elapsed, "kernels disagree"
        print(f"{g.n:>6} {rc.slots_elapsed:>8} {tp:>10.4f} {tc:>10.4f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
