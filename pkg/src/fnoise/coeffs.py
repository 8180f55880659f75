"""Regularly varying coefficient models R(k) = L(k) * k**(-alpha).

The weight law drives everything downstream: sigma_n^2 = sum_{k<=n} R(k),
the rescaled covariance is a linear functional of R, and the limiting
constant c = 2*pi^2*(1-alpha)/(3-alpha) depends only on the index alpha.
Two slowly varying families are supported,

    constant:  L(t) = c0
    logpower:  L(t) = c0 * (log(e + t))**beta

Below the monotonization cut A the raw weight is replaced by its value at
the cut.  That changes only finitely many coefficients (k < A) and keeps
R positive and well behaved near k = 1 for every admissible parameter set.

Karamata partial-sum asymptotics and Potter envelopes for L are exposed as
numeric checks; both are consumed by the verification suites downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_FAMILIES = ("constant", "logpower")


@dataclass(frozen=True)
class CoefficientModel:
    """Weight law R(t) = L(t) * t**(-alpha), flattened below ``cut``.

    alpha must be < 1: that is the long-memory regime in which the
    normalized maximum of the noise has a Gumbel limit.  Values >= 1
    are rejected at construction.  ``cut`` defaults to 1 for the
    constant family (no effect) and e for logpower.
    """

    alpha: float
    family: str = "constant"
    c0: float = 1.0
    beta: float = 0.0
    cut: float | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.alpha, (int, float)) or not math.isfinite(self.alpha):
            raise ValueError(f"alpha must be a finite real, got {self.alpha!r}")
        if self.alpha >= 1.0:
            raise ValueError(
                f"alpha={self.alpha} not supported: the Gumbel limit for the "
                "normalized maximum holds for alpha < 1 only"
            )
        if self.family not in _FAMILIES:
            raise ValueError(f"family must be one of {_FAMILIES}, got {self.family!r}")
        if not (self.c0 > 0 and math.isfinite(self.c0)):
            raise ValueError(f"c0 must be a positive finite real, got {self.c0!r}")
        if not math.isfinite(self.beta):
            raise ValueError(f"beta must be finite, got {self.beta!r}")
        if self.family == "constant" and self.beta != 0.0:
            raise ValueError("beta is only meaningful for the logpower family")
        if self.cut is None:
            default = 1.0 if self.family == "constant" else math.e
            object.__setattr__(self, "cut", default)
        if not (self.cut > 0 and math.isfinite(self.cut)):
            raise ValueError(f"cut must be a positive finite real, got {self.cut!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "c0", float(self.c0))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "cut", float(self.cut))


def _ell(model: CoefficientModel, t: np.ndarray) -> np.ndarray:
    """Slowly varying part L(t), vectorized."""
    t = np.asarray(t, dtype=float)
    if model.family == "constant":
        return np.full_like(t, model.c0)
    return model.c0 * np.log(math.e + t) ** model.beta


def _raw_weight(model: CoefficientModel, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return _ell(model, t) * t ** (-model.alpha)


@lru_cache(maxsize=8)
def _weights_cached(model: CoefficientModel, n: int) -> np.ndarray:
    k = np.arange(1, n + 1, dtype=float)
    r = _raw_weight(model, k)
    if model.cut > 1.0:
        flat = float(_raw_weight(model, np.array([model.cut]))[0])
        r[k < model.cut] = flat
    r.flags.writeable = False
    return r


def weights(model: CoefficientModel, n: int) -> np.ndarray:
    """R(1), ..., R(n) as a read-only array (cached; do not mutate)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return _weights_cached(model, int(n))


def weight(model: CoefficientModel, k: int) -> float:
    """R(k) = L(k) * k**(-alpha), with the flat segment below the cut."""
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    k = int(k)
    if k < model.cut:
        return float(_raw_weight(model, np.array([model.cut]))[0])
    return float(_raw_weight(model, np.array([float(k)]))[0])


@lru_cache(maxsize=64)
def sigma_sq(model: CoefficientModel, n: int) -> float:
    """Exact partial sum sigma_n^2 = sum_{k=1}^n R(k).

    Compensated summation (math.fsum): with n up to 1e6-1e7 and slowly
    decaying terms a naive left-to-right sum can lose digits relative to
    the 1% acceptance tolerances downstream.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return math.fsum(weights(model, int(n)))


def karamata_ratio(model: CoefficientModel, n: int, power: int) -> float:
    """Finite-n Karamata quotient for f(k) = k**power * R(k).

    Returns [sum_{k=1}^n k^p R(k)] * (1 + p - alpha) / (n^{p+1} R(n)),
    which tends to 1 as n grows because f is regularly varying with
    index p - alpha > -1.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if power < 0:
        raise ValueError(f"power must be a nonnegative integer, got {power}")
    if power - model.alpha <= -1.0:
        raise ValueError(
            f"power - alpha = {power - model.alpha} <= -1: the Karamata sum "
            "asymptotic requires an index exceeding -1"
        )
    n = int(n)
    p = int(power)
    k = np.arange(1, n + 1, dtype=float)
    total = math.fsum(k**p * weights(model, n))
    return total * (1.0 + p - model.alpha) / (float(n) ** (p + 1) * weight(model, n))


def potter_envelope(
    model: CoefficientModel,
    delta: float,
    x_grid,
    y_grid,
) -> float:
    """Smallest C with L(x)/L(y) <= C * max((x/y)^delta, (y/x)^delta) on the grids.

    The envelope is evaluated over every pair (x, y) in x_grid x y_grid;
    the returned C makes the inequality tight for at least one pair.
    """
    if not (delta > 0):
        raise ValueError(f"delta must be > 0, got {delta}")
    x = np.asarray(list(x_grid), dtype=float)
    y = np.asarray(list(y_grid), dtype=float)
    if x.size == 0 or y.size == 0:
        raise ValueError("potter_envelope needs nonempty grids")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("grid entries must be positive")
    lx = _ell(model, x)
    ly = _ell(model, y)
    log_x = np.log(x)
    log_y = np.log(y)
    best = -math.inf
    # Row chunks keep the pair matrix small when grids are large.
    step = max(1, int(4e6) // max(1, y.size))
    for lo in range(0, x.size, step):
        hi = min(lo + step, x.size)
        env = np.exp(delta * np.abs(log_x[lo:hi, None] - log_y[None, :]))
        ratio = lx[lo:hi, None] / ly[None, :]
        best = max(best, float(np.max(ratio / env)))
    return best


def model_to_kv(model: CoefficientModel) -> str:
    """Flat key=value form, e.g. 'alpha=0.5 family=logpower c0=1.0 beta=1.0 cut=2.718...'."""
    parts = [f"alpha={model.alpha!r}", f"family={model.family}", f"c0={model.c0!r}"]
    if model.family == "logpower":
        parts.append(f"beta={model.beta!r}")
    parts.append(f"cut={model.cut!r}")
    return " ".join(parts)


def model_from_kv(text: str) -> CoefficientModel:
    """Parse the flat key=value form produced by model_to_kv."""
    kv: dict[str, str] = {}
    for token in text.split():
        key, sep, value = token.partition("=")
        if not sep or not key or not value:
            raise ValueError(f"malformed model token {token!r} (expected key=value)")
        if key in kv:
            raise ValueError(f"duplicate model key {key!r}")
        kv[key] = value
    known = {"alpha", "family", "c0", "beta", "cut"}
    unknown = set(kv) - known
    if unknown:
        raise ValueError(f"unknown model keys: {sorted(unknown)}")
    if "alpha" not in kv:
        raise ValueError("model text must contain alpha=")
    try:
        return CoefficientModel(
            alpha=float(kv["alpha"]),
            family=kv.get("family", "constant"),
            c0=float(kv.get("c0", "1.0")),
            beta=float(kv.get("beta", "0.0")),
            cut=float(kv["cut"]) if "cut" in kv else None,
        )
    except ValueError:
        raise
    except Exception as exc:  # e.g. float("") style parse failures
        raise ValueError(f"cannot parse model text {text!r}: {exc}") from exc
