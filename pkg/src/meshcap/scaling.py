"""Scaling-law exponents, log-log fits, descriptive statistics and order-statistics checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .traffic import pareto_inverse_cdf

# bound schemes accepted by bound() / bound_exponent()
SCHEMES = (
    "homogeneous",
    "one-dissimilar-conventional",
    "one-dissimilar-partitioned",
    "heavy-conventional",
    "heavy-partitioned",
)


def bound_exponent(scheme: str, alpha: Optional[float] = None,
                   g_exponent: Optional[float] = None) -> float:
    """Exponent e of the throughput bound n**e, multiplicative constants dropped."""
    if scheme == "homogeneous":
        return 0.5
    if scheme in ("one-dissimilar-conventional", "one-dissimilar-partitioned"):
        if g_exponent is None:
            raise ValueError(f"{scheme} needs g_exponent")
        if scheme == "one-dissimilar-conventional":
            return 0.5 - g_exponent
        return 0.5 if g_exponent <= 0.5 else 1.0 - g_exponent
    if scheme in ("heavy-conventional", "heavy-partitioned"):
        if alpha is None or not alpha > 1:
            raise ValueError(f"{scheme} needs alpha > 1")
        if scheme == "heavy-conventional":
            return 0.5 - 1.0 / alpha
        return (alpha ** 2 + 2 * alpha - 4) / (2 * alpha ** 2 + 2 * alpha)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {', '.join(SCHEMES)}")


def bound(scheme: str, n: float, alpha: Optional[float] = None,
          g_exponent: Optional[float] = None) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(n) ** bound_exponent(scheme, alpha, g_exponent)


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r_squared: float
    slope_stderr: float


def fit_loglog(points) -> ScalingFit:
    """Least squares of ln T on ln n over (n, T) pairs."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3 or pts.shape[1] != 2:
        raise ValueError("fit_loglog needs at least three (n, T) points")
    if np.any(pts <= 0):
        raise ValueError("log-log fit needs positive n and T")
    if np.unique(pts[:, 0]).size < 3:
        raise ValueError("log-log fit needs at least three distinct sizes")
    x = np.log(pts[:, 0])
    y = np.log(pts[:, 1])
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    slope = np.sum((x - xm) * (y - ym)) / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((y - ym) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    k = len(x)
    stderr = math.sqrt(ss_res / (k - 2) / sxx) if k > 2 else 0.0
    return ScalingFit(float(slope), float(intercept), float(r2), float(stderr))


@dataclass(frozen=True)
class BoxStats:
    median: float
    q25: float
    q75: float
    p9: float
    p91: float
    outliers: tuple


def box_stats(samples) -> BoxStats:
    """Box-plot summary with 9th/91st percentile whiskers; outliers fall outside them."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("box_stats needs at least one sample")
    p9, q25, med, q75, p91 = np.percentile(x, [9, 25, 50, 75, 91])
    out = tuple(sorted(float(v) for v in x if v < p9 or v > p91))
    return BoxStats(float(med), float(q25), float(q75), float(p9), float(p91), out)


# two-sided 95% Student t quantiles, df = 1..30
_T975 = (
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
    2.201, 2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
    2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
)


def t_quantile_975(df: int) -> float:
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    return _T975[df - 1] if df <= len(_T975) else 1.96


@dataclass(frozen=True)
class Ci95:
    mean: float
    half_width: float
    n_samples: int

    @property
    def stderr(self) -> float:
        return self.half_width / t_quantile_975(self.n_samples - 1)


def ci95(samples) -> Ci95:
    x = np.asarray(samples, dtype=float)
    k = x.size
    if k < 2:
        raise ValueError("ci95 needs at least two samples")
    sem = float(x.std(ddof=1)) / math.sqrt(k)
    return Ci95(float(x.mean()), t_quantile_975(k - 1) * sem, k)


# --- heavy-tail order statistics -------------------------------------------

_CHUNK_ELEMS = 4_000_000


def _pareto_batches(n: int, alpha: float, reps: int, rng: np.random.Generator):
    per = max(1, _CHUNK_ELEMS // n)
    done = 0
    while done < reps:
        k = min(per, reps - done)
        yield pareto_inverse_cdf(1.0 - rng.random((k, n)), alpha)
        done += k


def mc_inv_max(n: int, alpha: float, reps: int, seed: int) -> float:
    """Monte Carlo mean of n**(1/alpha) / max(lambda_1..lambda_n)."""
    if not alpha > 0 or reps < 1:
        raise ValueError("need alpha > 0 and reps >= 1")
    rng = np.random.default_rng(seed)
    scale = float(n) ** (1.0 / alpha)
    vals = np.concatenate([scale / b.max(axis=1) for b in _pareto_batches(n, alpha, reps, rng)])
    return math.fsum(vals) / reps


def quadrature_inv_max(alpha: float) -> float:
    """alpha * integral_0^inf exp(-x**-alpha) / x**(alpha+2) dx, the Frechet-limit mean of 1/Y."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")

    def f(x):
        if x == 0.0:
            return 0.0
        lx = math.log(x)
        if -alpha * lx > 700.0:  # exp(-x**-alpha) underflows
            return 0.0
        return alpha * math.exp(-math.exp(-alpha * lx) - (alpha + 2) * lx)

    # split at 1: integrand vanishes super-exponentially at 0 and decays as x**-(alpha+2)
    a, _ = integrate.quad(f, 0.0, 1.0, epsabs=0.0, epsrel=1e-10, limit=200)
    b, _ = integrate.quad(f, 1.0, np.inf, epsabs=0.0, epsrel=1e-10, limit=200)
    return a + b


@dataclass(frozen=True)
class CentralOrderResult:
    mean: float  # mean of lambda_(n-m) * (m/n)**(1/alpha)
    a_n: float
    b_n: float
    samples: np.ndarray  # raw lambda_(n-m) draws

    def standardized(self) -> np.ndarray:
        return (self.samples - self.a_n) / self.b_n


def falk_normalizers(n: int, m: int, alpha: float) -> tuple[float, float]:
    """a_n = F^-1(1 - m/n), b_n = sqrt(m) / (n f(a_n)) for the Pareto law."""
    a = (n / m) ** (1.0 / alpha)
    density = alpha * a ** (-alpha - 1.0)
    return a, math.sqrt(m) / (n * density)


def mc_central_order(n: int, m: int, alpha: float, reps: int, seed: int) -> CentralOrderResult:
    """Monte Carlo of the (n-m)-th smallest of n heavy-tailed draws, scaled by (m/n)**(1/alpha)."""
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    k = n - m - 1  # 0-based position of lambda_(n-m)
    draws = np.concatenate([np.partition(b, k, axis=1)[:, k]
                            for b in _pareto_batches(n, alpha, reps, rng)])
    a, b = falk_normalizers(n, m, alpha)
    mean = math.fsum(draws * (m / n) ** (1.0 / alpha)) / reps
    return CentralOrderResult(mean, a, b, draws)


def mc_mean_concentration(n: int, alpha: float, reps: int, seed: int) -> tuple[float, float]:
    """(mean, variance) across reps of the sample mean of n heavy-tailed draws."""
    if reps < 2:
        raise ValueError("need reps >= 2 for a variance")
    rng = np.random.default_rng(seed)
    means = np.concatenate([b.mean(axis=1) for b in _pareto_batches(n, alpha, reps, rng)])
    return math.fsum(means) / reps, float(np.var(means, ddof=1))
