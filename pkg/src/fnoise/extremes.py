"""Normalization of path maxima and the Gumbel goodness-of-fit pipeline.

With sigma_n^2 = sum R(k), a_n = sqrt(2 log n) and the limiting curvature
constant c = 2*pi^2*(1-alpha)/(3-alpha), the normalized coordinate

    z = a_n * (M/sigma_n - a_n) - log(sqrt(c)/(sqrt(2)*pi))

of the path maximum M converges in law to the standard Gumbel
distribution G(z) = exp(-exp(-z)).  No parameters are fitted: location
and scale come from the limit law's own constants, so the report tests
the constants and not merely the Gumbel shape.  (A maximum-likelihood fit is
available separately as a diagnostic.)

Replicates draw from the counter-based stream (master seed, replicate
index), so results are independent of worker count and schedule; the
reduction iterates in replicate order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .coeffs import CoefficientModel, sigma_sq
from .covar import c_limit
from .maxfind import global_max
from .synth import draw

QUANTILE_PROBS = (0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99)


@dataclass(frozen=True)
class GumbelNormalization:
    n: int
    sigma_n: float
    a_n: float
    shift: float


@dataclass(frozen=True)
class MaxSample:
    replicate: int
    raw_max: float
    location: float
    z: float


@dataclass(frozen=True)
class GumbelReport:
    n: int
    replicates: int
    ks_distance: float
    p_value: float
    sample_mean: float
    sample_var: float
    quantiles: dict

    def __post_init__(self) -> None:
        if not (0.0 <= self.ks_distance <= 1.0):
            raise ValueError(f"ks_distance must be in [0, 1], got {self.ks_distance}")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "replicates": self.replicates,
            "ks_distance": self.ks_distance,
            "p_value": self.p_value,
            "sample_mean": self.sample_mean,
            "sample_var": self.sample_var,
            "quantiles": {repr(p): v for p, v in self.quantiles.items()},
        }


def normalization(model: CoefficientModel, n: int) -> GumbelNormalization:
    """Limit-law constants for degree n; needs n >= 2 (log n must be > 0)."""
    if n < 2:
        raise ValueError(f"normalization needs n >= 2 (log n <= 0 at n={n})")
    n = int(n)
    c = c_limit(model.alpha)
    return GumbelNormalization(
        n=n,
        sigma_n=math.sqrt(sigma_sq(model, n)),
        a_n=math.sqrt(2.0 * math.log(n)),
        shift=math.log(math.sqrt(c) / (math.sqrt(2.0) * math.pi)),
    )


def to_z(norm: GumbelNormalization, raw_max: float) -> float:
    """Affine normalization; strictly increasing in raw_max."""
    return norm.a_n * (raw_max / norm.sigma_n - norm.a_n) - norm.shift


def threshold(norm: GumbelNormalization, z0: float) -> float:
    """Raw-maximum threshold whose event {M <= threshold} is {z <= z0}."""
    return norm.sigma_n * (norm.a_n + (norm.shift + z0) / norm.a_n)


def gumbel_cdf(z: float) -> float:
    return math.exp(-math.exp(-z))


def gumbel_quantile(p: float) -> float:
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p}")
    return -math.log(-math.log(p))


def _kolmogorov_p(x: float) -> float:
    """Asymptotic survival 2*sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2),
    truncated once a term drops below 1e-10."""
    if x <= 0.0:
        return 1.0
    total = 0.0
    sign = 1.0
    j = 1
    while True:
        term = math.exp(-2.0 * j * j * x * x)
        total += sign * term
        if term < 1e-10:
            break
        sign = -sign
        j += 1
    return min(1.0, max(0.0, 2.0 * total))


def ks_test(z_samples) -> tuple[float, float]:
    """Exact KS distance of the sample against G, with asymptotic p-value.

    The empirical CDF is the right-continuous step function with jumps
    1/m at the order statistics, so the sup distance is attained at an
    order statistic from one side or the other:
      D+ = max_i (i/m - G(z_(i))),  D- = max_i (G(z_(i)) - (i-1)/m).
    """
    zs = np.sort(np.asarray(list(z_samples), dtype=float))
    m = zs.size
    if m < 2:
        raise ValueError(f"ks_test needs at least 2 samples, got {m}")
    g = np.exp(-np.exp(-zs))
    i = np.arange(1, m + 1, dtype=float)
    d_plus = float(np.max(i / m - g))
    d_minus = float(np.max(g - (i - 1.0) / m))
    d = max(d_plus, d_minus, 0.0)
    return d, _kolmogorov_p(math.sqrt(m) * d)


def gumbel_fit(z_samples) -> tuple[float, float]:
    """Diagnostic maximum-likelihood (location, scale) Gumbel fit.

    Never used by the acceptance checks, which test the limit law's own
    constants instead of fitting.
    """
    from scipy.stats import gumbel_r

    zs = np.asarray(list(z_samples), dtype=float)
    if zs.size < 2:
        raise ValueError("gumbel_fit needs at least 2 samples")
    loc, scale = gumbel_r.fit(zs)
    return float(loc), float(scale)


def _replicate(args) -> tuple[int, float, float, int]:
    model, n, seed, r, oversample = args
    d = draw(model, n, (seed, r))
    res = global_max(d, oversample=oversample)
    return r, res.value, res.location, res.iterations


def samples(
    model: CoefficientModel,
    n: int,
    reps: int,
    seed: int,
    oversample: int = 8,
    workers: int = 1,
) -> list[MaxSample]:
    """One MaxSample per replicate, in replicate order regardless of workers."""
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    norm = normalization(model, n)
    tasks = [(model, n, int(seed), r, int(oversample)) for r in range(int(reps))]
    if workers > 1:
        chunk = max(1, len(tasks) // (8 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(_replicate, tasks, chunksize=chunk))
    else:
        raw = [_replicate(t) for t in tasks]
    out = []
    for r, value, location, iterations in raw:
        out.append(
            MaxSample(replicate=r, raw_max=value, location=location,
                      z=to_z(norm, value))
        )
    return out


def report(
    model: CoefficientModel,
    n: int,
    reps: int,
    seed: int,
    oversample: int = 8,
    workers: int = 1,
) -> GumbelReport:
    """Full pipeline draw -> global_max -> z over reps replicates."""
    if reps < 100:
        raise ValueError(f"report needs reps >= 100 for stable statistics, got {reps}")
    samp = samples(model, n, reps, seed, oversample=oversample, workers=workers)
    zs = np.array([s.z for s in samp])
    d, p = ks_test(zs)
    mean = math.fsum(zs) / reps
    var = math.fsum((zs - mean) ** 2) / (reps - 1)
    quants = {p_: float(np.quantile(zs, p_)) for p_ in QUANTILE_PROBS}
    return GumbelReport(
        n=int(n),
        replicates=int(reps),
        ks_distance=d,
        p_value=p,
        sample_mean=mean,
        sample_var=var,
        quantiles=quants,
    )
