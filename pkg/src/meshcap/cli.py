"""Command-line entry point.

    meshcap simulate <config> [--output-dir DIR] [--threads N]
    meshcap scaling <scheme> [--alpha A] [--g-exponent G] [--n N ...]
    meshcap verify-orderstats <alpha> [n [reps]]
    meshcap verify-mac <L> [gamma]

Exit status: 0 on success, 1 on validation failure, 2 on runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import scaling
from .engine import BACKEND
from .grid import square_grid
from .harness import ConfigError, emit_csv, emit_summary, load_config, run_experiment
from .phy_mac import PhyParams, make_schedule, min_sinr_over_frame

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise _UsageError()


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="meshcap", description="Wireless mesh data-center throughput scaling toolkit.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run a configured experiment sweep and write CSV reports")
    sim.add_argument("config")
    sim.add_argument("--output-dir", help="overrides output_dir from the config")
    sim.add_argument("--threads", type=int, help="worker threads (default: MESHCAP_THREADS or CPU count)")

    sc = sub.add_parser("scaling", help="print a theoretical throughput exponent")
    sc.add_argument("scheme", choices=scaling.SCHEMES)
    sc.add_argument("--alpha", type=float)
    sc.add_argument("--g-exponent", type=float)
    sc.add_argument("--n", type=int, nargs="*", default=[9, 36, 81, 144, 225, 324])

    vo = sub.add_parser("verify-orderstats", help="Monte Carlo checks of the heavy-tail order-statistics lemmas")
    vo.add_argument("alpha", type=float)
    vo.add_argument("n", type=int, nargs="?", default=10 ** 5)
    vo.add_argument("reps", type=int, nargs="?", default=2000)
    vo.add_argument("--seed", type=int, default=0)

    vm = sub.add_parser("verify-mac", help="active-set sizes and worst-case SINR of the 9-TDMA schedule")
    vm.add_argument("L", type=int)
    vm.add_argument("gamma", type=float, nargs="?", default=4.0)
    vm.add_argument("--snr", type=float, default=1e6, help="P/N0 (default 1e6)")
    return p


def _simulate(args) -> int:
    path = Path(args.config)
    if not path.is_file():
        print(f"meshcap: config file not found: {path}", file=sys.stderr)
        return EXIT_INVALID
    cfg = load_config(path)
    report = run_experiment(cfg, threads=args.threads)
    out = Path(args.output_dir or cfg.output_dir)
    emit_csv(report, out)
    text = emit_summary(report)
    (out / "summary.txt").write_text(text)
    print(f"backend: {BACKEND}; beta: {report.beta:.6g}; results in {out}")
    print(text, end="")
    return EXIT_OK


def _scaling(args) -> int:
    e = scaling.bound_exponent(args.scheme, alpha=args.alpha, g_exponent=args.g_exponent)
    frac = Fraction(e).limit_denominator(1000)
    print(f"{args.scheme}: exponent {e:.4f} (~{frac})")
    for n in args.n:
        print(f"  n={n:<8d} bound n^e = {scaling.bound(args.scheme, n, args.alpha, args.g_exponent):.6g}")
    return EXIT_OK


def _verify_orderstats(args) -> int:
    a, n, reps, seed = args.alpha, args.n, args.reps, args.seed
    checks = []
    quad = scaling.quadrature_inv_max(a)
    gamma_ref = math.gamma(1 + 1 / a)
    checks.append(("quadrature vs Gamma(1+1/alpha)", quad, gamma_ref, 1e-6 * gamma_ref))
    checks.append(("E[n^(1/a)/max] Monte Carlo vs quadrature", scaling.mc_inv_max(n, a, reps, seed), quad, 0.03))
    m = max(1, int(round(math.sqrt(n))))
    central = scaling.mc_central_order(n, m, a, max(2, reps // 4), seed + 1)
    checks.append((f"lambda_(n-m)*(m/n)^(1/a), m={m}", central.mean, 1.0, 0.05))
    ok = True
    if a > 1:
        target = a / (a - 1)
        k = max(10, n // 10)
        mean, var = scaling.mc_mean_concentration(k, a, 200, seed + 2)
        checks.append((f"mean of {k} draws vs alpha/(alpha-1)", mean, target, 0.02 * target))
        if a > 2:
            _, var_small = scaling.mc_mean_concentration(max(2, k // 100), a, 200, seed + 3)
            shrinks = var < var_small
            ok &= shrinks
            print(f"{'PASS' if shrinks else 'FAIL'}  variance of mean shrinks with n: "
                  f"{var_small:.3g} -> {var:.3g}")
    for name, got, want, tol in checks:
        passed = abs(got - want) <= tol
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {got:.6f} (expected {want:.6f} +- {tol:.2g})")
    print(f"Falk normalizers at m={m}: a_n={central.a_n:.6g} b_n={central.b_n:.6g} "
          f"b_n/a_n={central.b_n / central.a_n:.4g}")
    return EXIT_OK if ok else EXIT_INVALID


def _verify_mac(args) -> int:
    grid = square_grid(args.L)
    schedule = make_schedule(grid)
    params = PhyParams(power=1.0, noise=1.0 / args.snr, gamma=args.gamma)
    sizes = [len(schedule.active_set(s)) for s in range(schedule.frame_len)]
    print(f"grid {args.L}x{args.L} (n={grid.n}), gamma={args.gamma:g}, P/N0={args.snr:g}")
    print("active set size per slot: " + " ".join(str(k) for k in sizes))
    if args.L % 3 == 0:
        print(f"n/9 = {grid.n // 9}; all slots equal: {all(k == grid.n // 9 for k in sizes)}")
    worst = min_sinr_over_frame(grid, schedule, params)
    print(f"min SINR over frame: {worst:.6g} ({10 * np.log10(worst):.2f} dB)")
    if args.gamma > 2:
        print(f"certified beta (feasible bound): {worst:.6g}")
    else:
        print("gamma <= 2: interference grows without bound as the grid grows")
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_help(sys.stderr)
        return EXIT_INVALID
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_INVALID
        handler = {"simulate": _simulate, "scaling": _scaling,
                   "verify-orderstats": _verify_orderstats, "verify-mac": _verify_mac}[args.command]
        return handler(args)
    except _UsageError:
        return EXIT_INVALID
    except (ConfigError, ValueError) as exc:
        print(f"meshcap: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # runtime failure, reported with its type
        print(f"meshcap: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
