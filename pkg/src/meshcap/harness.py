"""Seeded replication sweeps over network sizes, with CSV and text reports.

Config files are flat ``key = value`` lines; ``#`` starts a comment::

    sizes = 3..18 step 3          # grid side lengths L (n = L*L)
    scheme = one-dissimilar/two-phase
    g_exponent = 0.6667
    replications = 50
"""

from __future__ import annotations

import csv
import io
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import partition as part
from . import scaling
from .engine import ASSUMED, VERIFIED, EnginePolicy, NonTerminationError, run_conventional
from .grid import square_grid
from .phy_mac import PhyParams, feasible_beta, make_schedule
from .traffic import (build_sessions, rates_heavy_tailed, rates_homogeneous,
                      rates_one_dissimilar, sample_pairing)

log = logging.getLogger(__name__)

TRAFFIC_KINDS = ("homogeneous", "one-dissimilar", "heavy-tailed")
SCHEDULERS = ("conventional", "two-phase")

SAMPLES_HEADER = ("size", "n", "replication", "seed", "scheme", "throughput", "slots", "packets")
SUMMARY_HEADER = ("n", "mean", "median", "q25", "q75", "p9", "p91", "ci95_half", "stderr")


class ConfigError(ValueError):
    pass


class UnknownKeyError(ConfigError):
    pass


class MissingKeyError(ConfigError):
    pass


class InconsistentConfigError(ConfigError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    sizes: tuple
    traffic: str
    scheduler: str
    g_exponent: Optional[float] = None
    alpha: Optional[float] = None
    base_packets: int = 100
    replications: int = 200
    base_seed: int = 0
    phy: PhyParams = PhyParams()
    spacing: float = 1.0
    sinr_mode: str = ASSUMED
    partition: str = "auto"
    max_slots: int = 10 ** 9
    output_dir: str = "results"

    @property
    def scheme(self) -> str:
        return f"{self.traffic}/{self.scheduler}"

    def validate(self) -> "ExperimentConfig":
        if not self.sizes:
            raise InconsistentConfigError("sizes must not be empty")
        if any(L < 2 for L in self.sizes):
            raise InconsistentConfigError("every grid side must be >= 2")
        if self.traffic not in TRAFFIC_KINDS:
            raise InconsistentConfigError(f"unknown traffic kind {self.traffic!r}")
        if self.scheduler not in SCHEDULERS:
            raise InconsistentConfigError(f"unknown scheduler {self.scheduler!r}")
        if self.replications < 1:
            raise InconsistentConfigError("replications must be >= 1")
        if self.base_packets < 1:
            raise InconsistentConfigError("base_packets must be >= 1")
        if self.max_slots < 1:
            raise InconsistentConfigError("max_slots must be >= 1")
        if (self.alpha is not None) != (self.traffic == "heavy-tailed"):
            raise InconsistentConfigError("alpha is required for, and only allowed with, heavy-tailed traffic")
        if (self.g_exponent is not None) != (self.traffic == "one-dissimilar"):
            raise InconsistentConfigError("g_exponent is required for, and only allowed with, one-dissimilar traffic")
        if self.alpha is not None and not self.alpha > 1:
            raise InconsistentConfigError("alpha must exceed 1")
        if self.g_exponent is not None and not 0 < self.g_exponent < 1:
            raise InconsistentConfigError("g_exponent must lie in (0, 1)")
        if self.sinr_mode not in (ASSUMED, VERIFIED):
            raise InconsistentConfigError(f"sinr_mode must be {ASSUMED!r} or {VERIFIED!r}")
        if self.partition != "auto" and self.scheduler != "two-phase":
            raise InconsistentConfigError("partition applies only to the two-phase scheduler")
        _partition_strategy(self)  # raises on a malformed value
        return self


def _partition_strategy(cfg: ExperimentConfig) -> part.PartitionStrategy:
    p = cfg.partition
    if p == "auto":
        if cfg.traffic == "heavy-tailed":
            return part.OptimalHeavyTail(cfg.alpha)
        return part.SingleOutlier()
    if p == "single":
        return part.SingleOutlier()
    if p == "optimal":
        if cfg.alpha is None:
            raise InconsistentConfigError("partition = optimal needs heavy-tailed traffic")
        return part.OptimalHeavyTail(cfg.alpha)
    if p == "sweep":
        return part.SweepEmpirical()
    if p.startswith("fixed:"):
        try:
            return part.FixedM(int(p[len("fixed:"):]))
        except ValueError:
            pass
    raise InconsistentConfigError(f"bad partition value {p!r} (auto|single|optimal|sweep|fixed:<m>)")


_INT_KEYS = {"base_packets", "replications", "base_seed", "max_slots"}
_FLOAT_KEYS = {"g_exponent", "alpha", "power", "noise", "beta", "gamma", "spacing"}
_STR_KEYS = {"sinr_mode", "partition", "output_dir"}
KNOWN_KEYS = {"sizes", "scheme"} | _INT_KEYS | _FLOAT_KEYS | _STR_KEYS
REQUIRED_KEYS = ("sizes", "scheme")


def _parse_sizes(value: str) -> tuple:
    value = value.strip()
    try:
        if ".." in value:
            span, _, step = value.partition("step")
            lo, hi = (int(v) for v in span.split(".."))
            step = int(step) if step.strip() else 1
            if step < 1 or hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1, step))
        return tuple(int(v) for v in value.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"cannot parse sizes {value!r}") from None


def parse_config(text: str) -> ExperimentConfig:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key not in KNOWN_KEYS:
            raise UnknownKeyError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    for key in REQUIRED_KEYS:
        if key not in raw:
            raise MissingKeyError(f"missing required key {key!r}")

    traffic, _, scheduler = raw.pop("scheme").partition("/")
    kw = {"sizes": _parse_sizes(raw.pop("sizes")),
          "traffic": traffic.strip(), "scheduler": scheduler.strip() or "conventional"}
    phy_kw = {}
    for key, value in raw.items():
        try:
            if key in _INT_KEYS:
                conv = int(value)
            elif key in _FLOAT_KEYS:
                conv = float(value)
            else:
                conv = value
        except ValueError:
            raise ConfigError(f"bad value for {key!r}: {value!r}") from None
        if key in ("power", "noise", "beta", "gamma"):
            phy_kw[key] = conv
        else:
            kw[key] = conv
    try:
        kw["phy"] = PhyParams(**phy_kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return ExperimentConfig(**kw).validate()


def format_config(cfg: ExperimentConfig) -> str:
    """Canonical text form; ``parse_config(format_config(c)) == c``."""
    lines = [f"sizes = {', '.join(str(L) for L in cfg.sizes)}", f"scheme = {cfg.scheme}"]
    if cfg.g_exponent is not None:
        lines.append(f"g_exponent = {cfg.g_exponent!r}")
    if cfg.alpha is not None:
        lines.append(f"alpha = {cfg.alpha!r}")
    lines += [f"base_packets = {cfg.base_packets}", f"replications = {cfg.replications}",
              f"base_seed = {cfg.base_seed}", f"power = {cfg.phy.power!r}",
              f"noise = {cfg.phy.noise!r}", f"gamma = {cfg.phy.gamma!r}"]
    if cfg.phy.beta is not None:
        lines.append(f"beta = {cfg.phy.beta!r}")
    lines += [f"spacing = {cfg.spacing!r}", f"sinr_mode = {cfg.sinr_mode}",
              f"partition = {cfg.partition}", f"max_slots = {cfg.max_slots}",
              f"output_dir = {cfg.output_dir}"]
    return "\n".join(lines) + "\n"


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())


# --- running ----------------------------------------------------------------

@dataclass(frozen=True)
class Sample:
    size: int
    n: int
    replication: int
    seed: int
    scheme: str
    throughput: float
    slots: int
    packets: int


@dataclass(frozen=True)
class SizeSummary:
    n: int
    mean: float
    std: float
    box: scaling.BoxStats
    ci: scaling.Ci95


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    samples: list
    per_size: list = field(default_factory=list)
    fit: Optional[scaling.ScalingFit] = None
    std_fit: Optional[scaling.ScalingFit] = None
    theory_exponent: float = 0.5
    beta: Optional[float] = None

    @property
    def scheme(self) -> str:
        return self.config.scheme


def theory_exponent(cfg: ExperimentConfig) -> float:
    if cfg.traffic == "homogeneous":
        return scaling.bound_exponent("homogeneous")
    flavour = "conventional" if cfg.scheduler == "conventional" else "partitioned"
    if cfg.traffic == "one-dissimilar":
        return scaling.bound_exponent(f"one-dissimilar-{flavour}", g_exponent=cfg.g_exponent)
    return scaling.bound_exponent(f"heavy-{flavour}", alpha=cfg.alpha)


def worker_count() -> int:
    try:
        k = int(os.environ.get("MESHCAP_THREADS", "0"))
    except ValueError:
        k = 0
    return k if k > 0 else (os.cpu_count() or 1)


def resolve_phy(cfg: ExperimentConfig) -> PhyParams:
    """Certify beta against the largest grid; default beta is half the certified bound."""
    L = max(cfg.sizes)
    grid = square_grid(L, cfg.spacing)
    bound = feasible_beta(grid, make_schedule(grid), cfg.phy)
    if cfg.phy.beta is None:
        return cfg.phy.with_beta(0.5 * bound)
    if cfg.phy.beta > bound:
        raise InconsistentConfigError(
            f"beta={cfg.phy.beta:g} exceeds the certified bound {bound:g} at L={L}")
    return cfg.phy


class _SizeContext:
    def __init__(self, cfg: ExperimentConfig, L: int):
        self.grid = square_grid(L, cfg.spacing)
        self.schedule = make_schedule(self.grid)


def run_replication(cfg: ExperimentConfig, L: int, replication: int,
                    phy: Optional[PhyParams] = None, ctx: Optional[_SizeContext] = None) -> Sample:
    ctx = ctx or _SizeContext(cfg, L)
    grid, schedule, n = ctx.grid, ctx.schedule, ctx.grid.n
    seed = cfg.base_seed + replication
    if cfg.traffic == "homogeneous":
        rates = rates_homogeneous(n)
    elif cfg.traffic == "one-dissimilar":
        rates = rates_one_dissimilar(n, cfg.g_exponent)
    else:
        rates = rates_heavy_tailed(n, cfg.alpha, seed)
    sessions = build_sessions(grid, sample_pairing(n, seed), rates, cfg.base_packets)
    policy = EnginePolicy(sinr_mode=cfg.sinr_mode, max_slots=cfg.max_slots)
    try:
        if cfg.scheduler == "conventional":
            report = run_conventional(grid, schedule, sessions, policy, phy)
        else:
            plan = part.plan_partition(rates, _partition_strategy(cfg))
            report = part.run_two_phase(grid, schedule, sessions, rates, plan, policy, phy)
    except NonTerminationError as exc:
        raise NonTerminationError(f"size L={L} seed={seed}: {exc}") from exc
    return Sample(L, n, replication, seed, cfg.scheme, report.throughput,
                  report.total_slots, report.total_packets)


def summarize(cfg: ExperimentConfig, samples: Sequence[Sample], beta=None) -> ExperimentReport:
    per_size = []
    for L in sorted(set(cfg.sizes)):
        tp = np.array([s.throughput for s in samples if s.size == L])
        std = float(tp.std(ddof=1)) if tp.size > 1 else 0.0
        ci = scaling.ci95(tp) if tp.size > 1 else scaling.Ci95(float(tp.mean()), 0.0, int(tp.size))
        per_size.append(SizeSummary(L * L, float(tp.mean()), std, scaling.box_stats(tp), ci))
    report = ExperimentReport(cfg, list(samples), per_size,
                              theory_exponent=theory_exponent(cfg), beta=beta)
    if len(per_size) >= 3:
        report.fit = scaling.fit_loglog([(s.n, s.mean) for s in per_size])
        if all(s.std > 0 for s in per_size):
            report.std_fit = scaling.fit_loglog([(s.n, s.std) for s in per_size])
    return report


def run_experiment(cfg: ExperimentConfig, threads: Optional[int] = None) -> ExperimentReport:
    cfg.validate()
    phy = resolve_phy(cfg)
    contexts = {L: _SizeContext(cfg, L) for L in sorted(set(cfg.sizes))}
    jobs = [(L, r) for L in sorted(set(cfg.sizes)) for r in range(cfg.replications)]
    threads = threads or worker_count()
    log.info("running %d replications of %s on %d worker(s)", len(jobs), cfg.scheme, threads)

    def one(job):
        L, r = job
        return run_replication(cfg, L, r, phy, contexts[L])

    if threads == 1:
        samples = [one(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(one, jobs))
    return summarize(cfg, samples, beta=phy.beta)


# --- output -----------------------------------------------------------------

def _num(x) -> str:
    return repr(float(x))


def samples_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SAMPLES_HEADER)
    for s in sorted(report.samples, key=lambda s: (s.n, s.replication)):
        w.writerow((s.size, s.n, s.replication, s.seed, s.scheme, _num(s.throughput), s.slots, s.packets))
    return buf.getvalue()


def summary_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for s in sorted(report.per_size, key=lambda s: s.n):
        b = s.box
        w.writerow((s.n, _num(s.mean), _num(b.median), _num(b.q25), _num(b.q75), _num(b.p9),
                    _num(b.p91), _num(s.ci.half_width), _num(s.std / np.sqrt(s.ci.n_samples))))
    return buf.getvalue()


def emit_csv(report: ExperimentReport, path: Union[str, Path]) -> tuple[Path, Path]:
    """Write ``samples.csv`` and ``summary.csv`` into directory `path`."""
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        files = (out / "samples.csv", out / "summary.csv")
        for f, text in zip(files, (samples_csv(report), summary_csv(report))):
            with open(f, "w", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write results under {out}: {exc}") from exc
    return files


def emit_summary(reports) -> str:
    """Slope table: measured slope +- stderr, theoretical exponent, their difference."""
    if isinstance(reports, ExperimentReport):
        reports = [reports]
    lines = [f"{'scheme':<30} {'param':<12} {'measured slope':<18} {'theory':>8} {'difference':>11}"]
    for rep in reports:
        cfg = rep.config
        param = (f"alpha={cfg.alpha:g}" if cfg.alpha is not None else
                 f"g=n^{cfg.g_exponent:.4g}" if cfg.g_exponent is not None else "-")
        theory = round(rep.theory_exponent, 4)
        if rep.fit is None:
            lines.append(f"{cfg.scheme:<30} {param:<12} {'n/a (<3 sizes)':<18} {theory:>8.4f} {'n/a':>11}")
            continue
        slope = round(rep.fit.slope, 4)
        measured = f"{slope:.4f} +- {rep.fit.slope_stderr:.4f}"
        lines.append(f"{cfg.scheme:<30} {param:<12} {measured:<18} {theory:>8.4f} {abs(slope - theory):>11.4f}")
    for rep in reports:
        lines.append("")
        lines.append(f"[{rep.scheme}] per-size throughput ({rep.config.replications} replications)")
        lines.append(f"  {'n':>6} {'mean':>10} {'ci95':>10} {'median':>10} {'std':>10}")
        for s in rep.per_size:
            lines.append(f"  {s.n:>6} {s.mean:>10.4f} {s.ci.half_width:>10.4f} {s.box.median:>10.4f} {s.std:>10.4f}")
        if rep.std_fit is not None:
            lines.append(f"  std-dev slope {rep.std_fit.slope:.4f} +- {rep.std_fit.slope_stderr:.4f} (informational)")
    return "\n".join(lines) + "\n"
