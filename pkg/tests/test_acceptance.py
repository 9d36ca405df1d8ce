"""End-to-end acceptance checks at the stated tolerances.

Each test prints one ``PASS``/``FAIL`` line (shown even under output capture)
and then asserts. Simulation sweeps share module-scoped fixtures so that
criteria comparing schemes use the same seeds.
"""

import itertools
import math

import pytest

from meshcap.cli import main as cli_main
from meshcap.engine import TraceWriter, run_conventional, run_phase
from meshcap.grid import square_grid
from meshcap.harness import ExperimentConfig, run_experiment
from meshcap.partition import SingleOutlier, plan_partition, run_two_phase
from meshcap.phy_mac import PhyParams, make_schedule, min_sinr_over_frame
from meshcap.scaling import (mc_central_order, mc_inv_max, mc_mean_concentration,
                             quadrature_inv_max)
from meshcap.traffic import Session, build_sessions, rates_one_dissimilar, sample_pairing

SIDES = (3, 6, 9, 12, 15, 18)


@pytest.fixture
def verdict(capsys):
    def report(name, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        assert ok, detail
    return report


def _sweep(traffic, scheduler, reps, **kw):
    cfg = ExperimentConfig(sizes=SIDES, traffic=traffic, scheduler=scheduler,
                           replications=reps, base_packets=100, base_seed=0, **kw).validate()
    return run_experiment(cfg)


@pytest.fixture(scope="module")
def heavy5_conventional():
    return _sweep("heavy-tailed", "conventional", 100, alpha=5.0)


@pytest.fixture(scope="module")
def heavy5_two_phase():
    return _sweep("heavy-tailed", "two-phase", 100, alpha=5.0)


def test_c01_homogeneous_scaling(verdict):
    slope = _sweep("homogeneous", "conventional", 50).fit.slope
    verdict("C1 homogeneous slope", 0.42 <= slope <= 0.56, f"slope {slope:.4f} in [0.42, 0.56]")


@pytest.mark.parametrize("g,lo,hi", [(2 / 3, 0.28, 0.38), (1 / 3, 0.38, 0.55), (4 / 5, 0.12, 0.25)],
                         ids=["g=2/3", "g=1/3", "g=4/5"])
def test_c02_one_dissimilar_two_phase(verdict, g, lo, hi):
    slope = _sweep("one-dissimilar", "two-phase", 50, g_exponent=g).fit.slope
    verdict(f"C2 one-dissimilar two-phase g=n^{g:.4g}", lo <= slope <= hi,
            f"slope {slope:.4f} in [{lo}, {hi}]")


@pytest.mark.parametrize("alpha,floor", [(5.0, 0.30 - 0.07), (2.5, 0.10 - 0.07)], ids=["a=5", "a=2.5"])
def test_c03_heavy_conventional(verdict, heavy5_conventional, alpha, floor):
    rep = heavy5_conventional if alpha == 5.0 else _sweep("heavy-tailed", "conventional", 100, alpha=alpha)
    slope = rep.fit.slope
    verdict(f"C3 heavy-tailed conventional alpha={alpha:g}", slope >= floor,
            f"slope {slope:.4f} >= {floor:.2f}")


def test_c04_heavy_two_phase(verdict, heavy5_conventional, heavy5_two_phase):
    conv, two = heavy5_conventional.fit.slope, heavy5_two_phase.fit.slope
    floor = 31 / 60 - 0.10
    verdict("C4 heavy-tailed two-phase alpha=5", two >= conv and two >= floor,
            f"slope {two:.4f} >= conventional {conv:.4f} and >= {floor:.4f}")


@pytest.mark.parametrize("L", [12, 18])
def test_c05_dominance(verdict, L):
    grid = square_grid(L)
    sched = make_schedule(grid)
    rates = rates_one_dissimilar(grid.n, 2 / 3)
    plan = plan_partition(rates, SingleOutlier())
    wins = 0
    for seed in range(100):
        sessions = build_sessions(grid, sample_pairing(grid.n, seed), rates, 100)
        two = run_two_phase(grid, sched, sessions, rates, plan).throughput
        conv = run_conventional(grid, sched, sessions).throughput
        wins += two > conv
    verdict(f"C5 dominance n={grid.n}", wins >= 95, f"two-phase wins {wins}/100 (need >= 95)")


def test_c06_mac_feasibility(verdict):
    p4 = PhyParams(power=1.0, noise=1e-6, gamma=4.0)
    p2 = PhyParams(power=1.0, noise=1e-6, gamma=2.0)
    sizes_ok = all(len(make_schedule(square_grid(L)).active_set(t)) == L * L // 9
                   for L in (3, 9, 18, 30, 60) for t in range(9))

    def worst(L, p):
        g = square_grid(L)
        return min_sinr_over_frame(g, make_schedule(g), p)

    s18, s60 = worst(18, p4), worst(60, p4)
    ctrl = [worst(L, p2) for L in (18, 36, 60)]
    decays = ctrl[0] > ctrl[1] > ctrl[2]
    ok = sizes_ok and s60 >= 0.9 * s18 and decays
    verdict("C6 MAC feasibility", ok,
            f"|active|=n/9: {sizes_ok}; gamma=4 min SINR L=60 {s60:.4f} vs 0.9*L=18 {0.9 * s18:.4f}; "
            f"gamma=2 control {' > '.join(f'{v:.4f}' for v in ctrl)}")


def test_c07_routing_oracle(verdict):
    g3 = square_grid(3)
    pairs = list(itertools.permutations(range(9), 2))
    brute = sum(len(g3.xy_route(a, b)) - 1 for a, b in pairs) / len(pairs)
    ratios = {L: square_grid(L).mean_pair_hops() / L for L in (9, 18, 30)}
    ok = len(pairs) == 72 and brute == 2.0 and g3.mean_pair_hops() == pytest.approx(2.0) and \
        all(0.55 <= r <= 0.70 for r in ratios.values())
    verdict("C7 routing oracle", ok,
            f"3x3 mean hops {brute} over {len(pairs)} pairs; mean_hops/sqrt(n) "
            + ", ".join(f"L={L}: {r:.4f}" for L, r in ratios.items()))


def test_c08_order_statistics(verdict):
    quad = quadrature_inv_max(2.0)
    gamma_ok = abs(quad - math.gamma(1.5)) <= 1e-6
    inv = mc_inv_max(10 ** 5, 2.0, 2000, 0)
    central = mc_central_order(10 ** 5, 316, 2.0, 500, 1).mean
    mean, var_big = mc_mean_concentration(10 ** 4, 3.0, 200, 2)
    _, var_small = mc_mean_concentration(10 ** 2, 3.0, 200, 3)
    ok = (gamma_ok and abs(inv - quad) <= 0.03 and abs(central - 1.0) <= 0.05
          and abs(mean - 1.5) <= 0.02 * 1.5 and var_big < var_small)
    verdict("C8 order statistics", ok,
            f"quad {quad:.6f} vs Gamma {math.gamma(1.5):.6f}; inv_max {inv:.4f}; "
            f"central {central:.4f}; mean {mean:.4f}; var {var_small:.3g} -> {var_big:.3g}")


def test_c09_golden_trace(verdict):
    g = square_grid(6)
    sched = make_schedule(g)
    path = g.xy_route(g.node_id((5, 2)), g.node_id((1, 5)))
    trace = TraceWriter()
    run_phase(g, sched, [Session(0, path[0], path[-1], path, 1)], trace=trace)
    ok = len(trace.rows) == 7
    frames = []
    for k, (slot, tx, rx, _, _) in enumerate(trace.rows):
        label = sched.label(tx)
        frame, rem = divmod(slot + 1 - label, 9)
        ok &= rem == 0 and tx == path[k] and rx == path[k + 1]
        ok &= not frames or frame >= frames[-1]
        frames.append(frame)
    slots = [r[0] + 1 for r in trace.rows]
    verdict("C9 golden trace", ok, f"slots {slots} = 9*frame + label, frames {frames}")


def test_c10_determinism(verdict, tmp_path):
    conf = tmp_path / "det.conf"
    conf.write_text("sizes = 3, 6, 9\nscheme = heavy-tailed/two-phase\nalpha = 2.5\n"
                    "replications = 5\nbase_packets = 20\nbase_seed = 7\n")
    outs = []
    for name, threads in (("a", "1"), ("b", "4")):
        assert cli_main(["simulate", str(conf), "--output-dir", str(tmp_path / name),
                         "--threads", threads]) == 0
        outs.append([(tmp_path / name / f).read_bytes() for f in ("samples.csv", "summary.csv")])
    verdict("C10 determinism", outs[0] == outs[1], "samples.csv and summary.csv byte-identical across runs")
