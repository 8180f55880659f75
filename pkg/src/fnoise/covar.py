"""Rescaled covariance of the noise and the three-condition verification suite.

After rescaling time by 2*pi/n the process has correlation

    rho_n(t) = (1/sigma_n^2) * sum_{k=1}^n R(k) cos(2*pi*k*t/n),

an even, period-n function of the rescaled lag t.  The Gumbel limit for
the maximum rests on three conditions on rho_n, checked here numerically:

1. local expansion: rho_n(t) = 1 - c_n t^2 + eps_n(t) with eps_n(t)/t^2
   small uniformly, where c_n = (2*pi^2/(n^2 sigma_n^2)) sum k^2 R(k);
2. decay: rho_n(t) log t stays below a threshold on [T, n/2];
3. non-degeneracy: sup |rho_n| on [eps, n/2] stays away from 1.

Condition 3 also gets an analytic band bound 1 - (2^{1-alpha}-1) a^{1-alpha} eta,
from frequencies k in [a*n, 2*a*n] alone, reported alongside the grid sup.
The tail machinery (Dirichlet kernel bound |D_k(t/n)| <= 1/2 + n/(2t) and
the envelope |rho_n(t)| <= C max(t^{alpha-1+delta}, 1/t)) is exposed as an
empirical-envelope check across n.

Small-k weight flattening below the model's cut shifts rho_n by at most
(1/sigma_n^2) * sum_{k<cut} |R_raw(k) - R(k)|; every report carries that
term separately instead of folding it into pass/fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coeffs import CoefficientModel, _raw_weight, sigma_sq, weights


@dataclass(frozen=True)
class CovarianceProfile:
    """Tabulated rho_n on [0, n/2] with its constants."""

    n: int
    sigma_sq: float
    c_n: float
    t: np.ndarray
    rho: np.ndarray
    model: CoefficientModel

    def __post_init__(self) -> None:
        for name in ("t", "rho"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class ConditionReport:
    condition: int
    n: int
    alpha: float
    family: str
    sup_value: float
    achieving_t: float
    passed: bool
    threshold: float
    modification_bound: float
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "n": self.n,
            "alpha": self.alpha,
            "family": self.family,
            "sup_value": self.sup_value,
            "achieving_t": self.achieving_t,
            "pass": self.passed,
            "threshold": self.threshold,
            "modification_bound": self.modification_bound,
            "details": self.details,
        }


@dataclass(frozen=True)
class TailReport:
    n: int
    alpha: float
    family: str
    delta: float
    c_hat: float
    achieving_t: float
    dirichlet_ok: bool
    passed: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "family": self.family,
            "delta": self.delta,
            "c_hat": self.c_hat,
            "achieving_t": self.achieving_t,
            "dirichlet_ok": self.dirichlet_ok,
            "pass": self.passed,
        }


def _next_pow2(m: int) -> int:
    return 1 << (int(m) - 1).bit_length()


def _rho_direct(model: CoefficientModel, n: int, t: float) -> float:
    """Compensated direct sum, no domain restriction (rho has period n)."""
    k = np.arange(1, n + 1, dtype=float)
    terms = weights(model, n) * np.cos(2.0 * math.pi * k * t / n)
    return math.fsum(terms) / sigma_sq(model, n)


def rho(model: CoefficientModel, n: int, t: float) -> float:
    """rho_n(t) for |t| <= n/2 by compensated summation."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if abs(t) > n / 2:
        raise ValueError(f"t={t} outside the fundamental domain [-n/2, n/2]")
    return _rho_direct(model, int(n), float(t))


def rho_table(
    model: CoefficientModel, n: int, step: float = 0.1
) -> tuple[np.ndarray, np.ndarray]:
    """Dense tabulation of rho_n at t_j = j*n/m on [0, n/2] via one irfft.

    m is the next power of two with n/m <= step (and m > 2n against
    aliasing); same transform identity as the path evaluator.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    n = int(n)
    m = _next_pow2(max(math.ceil(n / step), 2 * n + 2))
    spectrum = np.zeros(m // 2 + 1)
    spectrum[1 : n + 1] = (m / 2.0) * weights(model, n) / sigma_sq(model, n)
    values = np.fft.irfft(spectrum, n=m)[: m // 2 + 1]
    t = np.arange(m // 2 + 1) * (n / m)
    return t, values


def c_n(model: CoefficientModel, n: int) -> float:
    """Finite-n curvature constant (2*pi^2/(n^2 sigma_n^2)) sum k^2 R(k)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    n = int(n)
    k = np.arange(1, n + 1, dtype=float)
    num = math.fsum(k * k * weights(model, n))
    return 2.0 * math.pi**2 * num / (float(n) ** 2 * sigma_sq(model, n))


def c_limit(alpha: float) -> float:
    """Limiting constant c = 2*pi^2*(1-alpha)/(3-alpha)."""
    if alpha >= 1.0:
        raise ValueError(f"alpha={alpha} not in the alpha < 1 regime")
    return 2.0 * math.pi**2 * (1.0 - alpha) / (3.0 - alpha)


def profile(model: CoefficientModel, n: int, step: float = 0.1) -> CovarianceProfile:
    t, values = rho_table(model, n, step)
    return CovarianceProfile(
        n=int(n),
        sigma_sq=sigma_sq(model, n),
        c_n=c_n(model, n),
        t=t,
        rho=values,
        model=model,
    )


def modification_bound(model: CoefficientModel, n: int) -> float:
    """(1/sigma_n^2) sum_{k < cut} |R_raw(k) - R(k)|, the rho_n shift cap."""
    top = min(int(n), math.ceil(model.cut) - 1)
    if top < 1:
        return 0.0
    k = np.arange(1, top + 1, dtype=float)
    raw = _raw_weight(model, k)
    flat = weights(model, n)[:top]
    return math.fsum(np.abs(raw - flat)) / sigma_sq(model, n)


def check_condition1(
    model: CoefficientModel,
    n: int,
    t_max: float = 0.02,
    eps_budget: float = 0.01,
    grid: int = 256,
) -> ConditionReport:
    """Local expansion: sup_{0<|t|<=t_max} |rho_n(t) - 1 + c_n t^2| / t^2.

    The residual is summed as R(k)*(x^2/2 - 2 sin^2(x/2)) with
    x = 2*pi*k*t/n, which is the Taylor remainder term by term and avoids
    the catastrophic cancellation of forming rho - 1 + c_n t^2 directly.
    """
    if not (0.0 < t_max <= 1.0):
        raise ValueError(f"t_max must lie in (0, 1], got {t_max}")
    n = int(n)
    w = weights(model, n)
    s2 = sigma_sq(model, n)
    k = np.arange(1, n + 1, dtype=float)
    sup_ratio = -math.inf
    sup_t = math.nan
    for j in range(1, int(grid) + 1):
        t = t_max * j / grid
        x = 2.0 * math.pi * k * t / n
        half = np.sin(0.5 * x)
        resid = math.fsum(w * (0.5 * x * x - 2.0 * half * half)) / s2
        ratio = abs(resid) / (t * t)
        if ratio > sup_ratio:
            sup_ratio = ratio
            sup_t = t
    return ConditionReport(
        condition=1,
        n=n,
        alpha=model.alpha,
        family=model.family,
        sup_value=sup_ratio,
        achieving_t=sup_t,
        passed=sup_ratio <= eps_budget,
        threshold=eps_budget,
        modification_bound=modification_bound(model, n),
        details={"t_max": t_max, "grid": int(grid), "c_n": c_n(model, n)},
    )


def check_condition2(
    model: CoefficientModel,
    n: int,
    T: float = 20.0,
    eps: float = 0.5,
    step: float = 0.1,
) -> ConditionReport:
    """Decay: sup over [T, n/2] of rho_n(t) * log t against eps.

    T = 1 is accepted (log 1 = 0 makes the product vanish there), so the
    degenerate small-n case n = 2, T -> 1 produces a finite report.
    """
    n = int(n)
    if not (1.0 <= T <= n / 2):
        raise ValueError(f"T={T} must satisfy 1 <= T <= n/2 = {n / 2}")
    t, values = rho_table(model, n, step)
    mask = (t >= T) & (t <= n / 2)
    ts = np.concatenate([t[mask], [T, n / 2.0]])
    vs = np.concatenate(
        [values[mask], [_rho_direct(model, n, T), _rho_direct(model, n, n / 2.0)]]
    )
    prod = vs * np.log(ts)
    i = int(np.argmax(prod))
    sup = float(prod[i])
    return ConditionReport(
        condition=2,
        n=n,
        alpha=model.alpha,
        family=model.family,
        sup_value=sup,
        achieving_t=float(ts[i]),
        passed=sup < eps,
        threshold=eps,
        modification_bound=modification_bound(model, n),
        details={"T": T, "step": step},
    )


def check_condition3(
    model: CoefficientModel,
    n: int,
    eps: float = 0.5,
    margin: float = 1e-3,
    T_band: float = 20.0,
    step: float = 0.1,
) -> ConditionReport:
    """Non-degeneracy: sup over [eps, n/2] of |rho_n(t)| against 1 - margin.

    Alongside the grid sup, an analytic band bound is searched: for each a
    in a small dyadic set, eta is the largest value with |cos(2*pi*k*t/n)|
    <= 1 - eta over integer k in [a*n, 2*a*n] and t in [eps, min(T_band,
    n/2)], and the frequencies in that band alone force

        |rho_n(t)| <= 1 - (2^{1-alpha} - 1) * a^{1-alpha} * eta.

    The pass verdict uses the grid sup only; the band triple (a, eta,
    bound) is reported for diagnostics.
    """
    n = int(n)
    if not (0.0 < eps <= n / 2):
        raise ValueError(f"eps={eps} must satisfy 0 < eps <= n/2 = {n / 2}")
    t, values = rho_table(model, n, step)
    mask = (t >= eps) & (t <= n / 2)
    ts = np.concatenate([t[mask], [eps, n / 2.0]])
    vs = np.abs(
        np.concatenate(
            [values[mask], [_rho_direct(model, n, eps), _rho_direct(model, n, n / 2.0)]]
        )
    )
    i = int(np.argmax(vs))
    sup = float(vs[i])

    band_a = band_eta = band_bound = None
    t_hi = min(T_band, n / 2.0)
    if t_hi > eps:
        t_band = np.arange(eps, t_hi + 0.01, 0.01)
        factor = 2.0 ** (1.0 - model.alpha) - 1.0
        # eta > 0 needs the phase range [a*eps, 2*a*t_hi] clear of every
        # half-integer, so the sweep must reach below 1/(4*t_hi); beyond
        # 2^-16 the bound deficit (~a^{3-alpha}) is negligible.
        dyadic = [2.0 ** -j for j in range(1, 17) if 2.0 ** -j * n >= 1.0]
        for a in dyadic:
            k_lo = math.ceil(a * n)
            k_hi = math.floor(2.0 * a * n)
            worst = 0.0
            for blk in range(k_lo, k_hi + 1, 1024):
                k_blk = np.arange(blk, min(blk + 1024, k_hi + 1), dtype=float)
                c = np.abs(np.cos(2.0 * math.pi * np.outer(k_blk, t_band) / n))
                worst = max(worst, float(np.max(c)))
            eta = 1.0 - worst
            bound = 1.0 - factor * a ** (1.0 - model.alpha) * eta
            if band_bound is None or bound < band_bound:
                band_a, band_eta, band_bound = a, eta, bound
    return ConditionReport(
        condition=3,
        n=n,
        alpha=model.alpha,
        family=model.family,
        sup_value=sup,
        achieving_t=float(ts[i]),
        passed=sup < 1.0 - margin,
        threshold=1.0 - margin,
        modification_bound=modification_bound(model, n),
        details={
            "eps": eps,
            "margin": margin,
            "band_a": band_a,
            "band_eta": band_eta,
            "band_bound": band_bound,
        },
    )


def dirichlet_kernel(k: int, t: float) -> float:
    """D_k(t) = sum_{j=1}^k cos(2*pi*j*t) in closed form.

    At integer t every cosine is 1, so the limit value is k; near-integer
    t falls back to the direct sum because the closed form divides by
    sin(pi*t) there.
    """
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    k = int(k)
    if t == round(t):
        return float(k)
    s = math.sin(math.pi * t)
    if abs(s) < 1e-8:
        j = np.arange(1, k + 1, dtype=float)
        return float(math.fsum(np.cos(2.0 * math.pi * j * t)))
    return 0.5 * (math.sin((2 * k + 1) * math.pi * t) / s - 1.0)


def check_tail_bounds(
    model: CoefficientModel,
    n: int,
    t_grid=None,
    delta: float = 0.25,
) -> TailReport:
    """Empirical envelope C_hat = max_t |rho_n(t)| / max(t^{alpha-1+delta}, 1/t).

    Also spot-checks the Dirichlet kernel inequality |D_k(t/n)| <= 1/2 +
    n/(2t) on a log-spaced (k, t) sample; kappa = 2 comes from
    sin(pi*x) >= 2x on [0, 1/2].
    """
    if not (delta > 0):
        raise ValueError(f"delta must be positive, got {delta}")
    if model.alpha - 1.0 + delta >= 0.0:
        raise ValueError(
            f"alpha - 1 + delta = {model.alpha - 1.0 + delta} must be negative "
            "for the envelope exponent to decay"
        )
    n = int(n)
    if n < 2:
        raise ValueError(f"tail bounds need n >= 2, got {n}")
    if t_grid is None:
        t, values = rho_table(model, n)
        mask = (t >= 1.0) & (t <= n / 2)
        ts = t[mask]
        vs = np.abs(values[mask])
    else:
        ts = np.asarray(list(t_grid), dtype=float)
        if ts.size == 0 or np.any(ts < 1.0) or np.any(ts > n / 2):
            raise ValueError("t_grid entries must lie in [1, n/2]")
        vs = np.abs([_rho_direct(model, n, t) for t in ts])
    env = np.maximum(ts ** (model.alpha - 1.0 + delta), 1.0 / ts)
    ratios = vs / env
    i = int(np.argmax(ratios))

    ks = np.unique(np.geomspace(1, n, 16).round().astype(int))
    t_samp = np.geomspace(1.0, n / 2.0, 12)
    ok = True
    for k in ks:
        for t in t_samp:
            if abs(dirichlet_kernel(int(k), t / n)) > 0.5 + n / (2.0 * t) + 1e-12:
                ok = False
    c_hat = float(ratios[i])
    return TailReport(
        n=n,
        alpha=model.alpha,
        family=model.family,
        delta=delta,
        c_hat=c_hat,
        achieving_t=float(ts[i]),
        dirichlet_ok=ok,
        passed=ok and math.isfinite(c_hat),
    )


def envelope_growth(
    model: CoefficientModel, n_list, delta: float = 0.25
) -> dict:
    """C_hat across an n sweep; pass iff the largest-to-smallest-n ratio < 2
    and every Dirichlet spot-check held."""
    ns = sorted(int(n) for n in n_list)
    if len(ns) < 2:
        raise ValueError("envelope_growth needs at least two n values")
    reports = [check_tail_bounds(model, n, delta=delta) for n in ns]
    ratio = reports[-1].c_hat / reports[0].c_hat
    return {
        "delta": delta,
        "n_list": ns,
        "c_hat": [r.c_hat for r in reports],
        "ratio": ratio,
        "dirichlet_ok": all(r.dirichlet_ok for r in reports),
        "pass": ratio < 2.0 and all(r.dirichlet_ok for r in reports),
        "reports": [r.to_dict() for r in reports],
    }
