"""Synthesis of the random trigonometric polynomial X_n.

A draw is

    X_n(t) = sum_{k=1}^n sqrt(R(k)) * (U_k sin(kt) + V_k cos(kt)),

with U_k, V_k independent standard Gaussians.  Variates come from a
counter-based stream: replicate r of master seed s uses Philox keyed by
(s, r), so the draw depends only on (model, n, seed_path) and never on
thread scheduling or replicate order.  Uniforms are mapped to Gaussians
by inverse-CDF, fixed once here.

Evaluation is available pointwise (compensated direct summation), as
first/second derivatives, and on dense equispaced grids over [-pi, pi)
through a single inverse real FFT: with t_j = -pi + 2*pi*j/N,

    X_n(t_j) = sum_k (-1)^k w_k [u_k sin(2*pi*k*j/N) + v_k cos(2*pi*k*j/N)],

so the grid values are irfft of the spectrum S[k] = (N/2) * (-1)^k *
w_k * (v_k - i u_k), zero-padded to N/2+1 bins.  N >= 2n+1 keeps a
degree-n polynomial alias-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .coeffs import CoefficientModel, weights

_TWO53 = 2**53


@dataclass(frozen=True)
class NoiseDraw:
    """One realization: degree n, variates (u, v), weights w = sqrt(R(k))."""

    n: int
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    model: CoefficientModel
    seed_path: tuple[int, int]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        for name in ("u", "v", "w"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (self.n,):
                raise ValueError(f"{name} must have shape ({self.n},), got {arr.shape}")
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if np.any(self.w <= 0):
            raise ValueError("weights w must be positive")

    def sigma(self) -> float:
        """sigma_n = sqrt(sum R(k)) for this draw's weights."""
        return math.sqrt(math.fsum(self.w.astype(float) ** 2))


@dataclass(frozen=True)
class GridEvaluation:
    """Values of one draw at t_j = -pi + 2*pi*j/N, j = 0..N-1."""

    N: int
    values: np.ndarray
    draw: NoiseDraw

    def __post_init__(self) -> None:
        if self.N < 2 * self.draw.n + 1:
            raise ValueError(
                f"N={self.N} < 2n+1={2 * self.draw.n + 1}: grid would alias a "
                f"degree-{self.draw.n} trigonometric polynomial"
            )
        vals = np.asarray(self.values, dtype=float)
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def times(self) -> np.ndarray:
        return -math.pi + 2.0 * math.pi * np.arange(self.N) / self.N


def _gaussians(seed_path: tuple[int, int], count: int) -> np.ndarray:
    master, replicate = seed_path
    if master < 0 or replicate < 0:
        raise ValueError(f"seed_path entries must be nonnegative, got {seed_path}")
    key = np.array([master, replicate], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    raw = gen.integers(0, _TWO53, size=count, dtype=np.uint64)
    # Midpoint offset keeps the uniforms strictly inside (0, 1).
    uniforms = (raw.astype(np.float64) + 0.5) / _TWO53
    return ndtri(uniforms)


def draw(model: CoefficientModel, n: int, seed_path: tuple[int, int]) -> NoiseDraw:
    """Materialize one replicate from the counter-based stream."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    n = int(n)
    z = _gaussians((int(seed_path[0]), int(seed_path[1])), 2 * n)
    w = np.sqrt(weights(model, n))
    return NoiseDraw(
        n=n,
        u=z[:n],
        v=z[n:],
        w=w,
        model=model,
        seed_path=(int(seed_path[0]), int(seed_path[1])),
    )


def eval_at(d: NoiseDraw, t: float) -> float:
    """X_n(t) by direct summation with compensated accumulation."""
    k = np.arange(1, d.n + 1, dtype=float)
    terms = d.w * (d.u * np.sin(k * t) + d.v * np.cos(k * t))
    return math.fsum(terms)


def deriv_at(d: NoiseDraw, t: float, order: int) -> float:
    """First or second derivative of X_n at t (termwise differentiation)."""
    k = np.arange(1, d.n + 1, dtype=float)
    if order == 1:
        terms = k * d.w * (d.u * np.cos(k * t) - d.v * np.sin(k * t))
    elif order == 2:
        terms = -(k * k) * d.w * (d.u * np.sin(k * t) + d.v * np.cos(k * t))
    else:
        raise ValueError(f"order must be 1 or 2, got {order}")
    return float(np.sum(terms, dtype=np.longdouble))


def _spectrum(d: NoiseDraw, N: int, second_derivative: bool = False) -> np.ndarray:
    k = np.arange(1, d.n + 1, dtype=float)
    sign = np.where(np.arange(1, d.n + 1) % 2 == 0, 1.0, -1.0)
    a = sign * d.w * d.v
    b = sign * d.w * d.u
    if second_derivative:
        a = -(k * k) * a
        b = -(k * k) * b
    coeffs = np.zeros(N // 2 + 1, dtype=complex)
    coeffs[1 : d.n + 1] = (N / 2.0) * (a - 1j * b)
    return coeffs


def _grid_values(d: NoiseDraw, N: int, second_derivative: bool = False) -> np.ndarray:
    return np.fft.irfft(_spectrum(d, N, second_derivative), n=N)


def eval_grid(d: NoiseDraw, N: int) -> GridEvaluation:
    """All N equispaced values over [-pi, pi) in O(N log N).

    N must be a power of two (keeps the transform on its fast path and
    makes grid sizes predictable across the toolkit) and at least 2n+1.
    """
    N = int(N)
    if N < 2 * d.n + 1:
        raise ValueError(
            f"N={N} < 2n+1={2 * d.n + 1}: grid would alias a degree-{d.n} "
            "trigonometric polynomial"
        )
    if N & (N - 1) != 0:
        raise ValueError(f"N={N} is not a power of two")
    return GridEvaluation(N=N, values=_grid_values(d, N), draw=d)


def dump_draw(d: NoiseDraw, path: str) -> None:
    """Debugging CSV of the draw (columns k, u, v, w); format not stable."""
    u, v, w = d.u.tolist(), d.v.tolist(), d.w.tolist()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("k,u,v,w\n")
        for k in range(d.n):
            fh.write(f"{k + 1},{u[k]!r},{v[k]!r},{w[k]!r}\n")
