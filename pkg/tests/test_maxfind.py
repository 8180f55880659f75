"""Global maximum tests: closed forms, dense-grid oracles, symmetry
relations, and the refinement failure path."""

import math

import numpy as np
import pytest

import fnoise.maxfind
from fnoise import (
    CoefficientModel,
    NoiseDraw,
    RefinementError,
    deriv_at,
    draw,
    eval_at,
    global_max,
    global_min,
    weights,
)


def _manual_draw(n, u, v, alpha=0.5):
    m = CoefficientModel(alpha=alpha)
    return NoiseDraw(
        n=n,
        u=np.asarray(u, dtype=float),
        v=np.asarray(v, dtype=float),
        w=np.sqrt(weights(m, n)),
        model=m,
        seed_path=(0, 0),
    )


def test_single_frequency_closed_form():
    """u sin t + v cos t peaks at sqrt(u^2 + v^2), at t = pi/2 - atan2(v, u)."""
    d = _manual_draw(1, [0.6], [-0.8])
    res = global_max(d)
    assert abs(res.value - 1.0) < 1e-10
    t_star = math.pi / 2.0 - math.atan2(-0.8, 0.6)
    if t_star >= math.pi:
        t_star -= 2.0 * math.pi
    assert abs(res.location - t_star) < 1e-10


def test_zero_draw_reports_leftmost_tie():
    d = _manual_draw(3, [0, 0, 0], [0, 0, 0])
    res = global_max(d)
    assert res.value == 0.0
    assert res.location == -math.pi
    assert res.iterations == 0


def test_pure_cosine_peaks_at_origin():
    """cos(2t) has maxima at t in {-pi, 0}; the tie-break picks -pi."""
    d = _manual_draw(2, [0, 0], [0, 1])
    res = global_max(d)
    w2 = d.w[1]
    assert abs(res.value - w2) < 1e-12
    assert abs(res.location - (-math.pi)) < 1e-9


def test_matches_dense_grid_oracle():
    """Refined maximum dominates a 200001-point scan and sits on a
    critical point."""
    m = CoefficientModel(alpha=0.5)
    for rep in range(4):
        d = draw(m, 16, (77, rep))
        res = global_max(d)
        ts = np.linspace(-math.pi, math.pi, 200_001)
        k = np.arange(1, 17)
        dense = (np.sin(np.outer(ts, k)) @ (d.w * d.u)
                 + np.cos(np.outer(ts, k)) @ (d.w * d.v)).max()
        sigma = d.sigma()
        assert res.value >= dense - 1e-12 * sigma
        assert res.value <= dense + 1e-6 * sigma
        assert abs(deriv_at(d, res.location, 1)) < 1e-7 * sigma


def test_value_never_below_grid_value():
    m = CoefficientModel(alpha=0.5)
    for rep in range(5):
        res = global_max(draw(m, 128, (31, rep)))
        assert res.value >= res.grid_value
        assert -math.pi <= res.location < math.pi
        assert res.iterations > 0


def test_min_is_negated_max_of_flipped_draw():
    """X and -X swap roles of max and min exactly."""
    m = CoefficientModel(alpha=0.5)
    d = draw(m, 64, (55, 1))
    neg = NoiseDraw(n=d.n, u=-d.u, v=-d.v, w=d.w, model=d.model,
                    seed_path=d.seed_path)
    mn = global_min(d)
    mx = global_max(neg)
    assert mn.value == -mx.value
    assert mn.location == mx.location
    assert mn.value <= mn.grid_value


def test_scaling_equivariance():
    """Doubling every coefficient doubles the maximum."""
    m = CoefficientModel(alpha=0.5)
    d = draw(m, 64, (19, 0))
    d2 = NoiseDraw(n=d.n, u=2.0 * d.u, v=2.0 * d.v, w=d.w, model=d.model,
                   seed_path=d.seed_path)
    r1 = global_max(d)
    r2 = global_max(d2)
    assert abs(r2.value - 2.0 * r1.value) < 1e-12 * d.sigma()


def test_reflection_symmetry():
    """Flipping the sine coefficients mirrors the path, so the maximum
    value is unchanged and its location negates (up to ties)."""
    m = CoefficientModel(alpha=0.5)
    d = draw(m, 32, (23, 0))
    refl = NoiseDraw(n=d.n, u=-d.u, v=d.v, w=d.w, model=d.model,
                     seed_path=d.seed_path)
    r = global_max(d)
    rr = global_max(refl)
    assert abs(r.value - rr.value) < 1e-10 * d.sigma()
    assert abs(rr.location - (-r.location)) < 1e-8


def test_oversample_refines_to_same_point():
    """The refined maximum is grid-resolution independent once alias-free."""
    m = CoefficientModel(alpha=0.5)
    for rep in range(3):
        d = draw(m, 48, (41, rep))
        lo = global_max(d, oversample=4)
        hi = global_max(d, oversample=16)
        assert abs(lo.value - hi.value) < 1e-10 * d.sigma()


def test_oversample_validation():
    m = CoefficientModel(alpha=0.5)
    d = draw(m, 8, (1, 0))
    with pytest.raises(ValueError):
        global_max(d, oversample=2)


def test_refinement_failure_raises_with_seed_path(monkeypatch):
    m = CoefficientModel(alpha=0.5)
    d = draw(m, 32, (99, 7))
    monkeypatch.setattr(fnoise.maxfind, "_MAX_ITER", 0)
    with pytest.raises(RefinementError, match=r"seed_path=\(99, 7\)"):
        global_max(d)


def test_max_and_negated_min_share_distribution():
    """-X has the same law as X, so max(X) and -min(X) are equidistributed.
    Two-sample KS over disjoint replicate streams should not reject."""
    from scipy.stats import ks_2samp

    m = CoefficientModel(alpha=0.5)
    n, reps = 32, 150
    maxima = [global_max(draw(m, n, (404, r))).value for r in range(reps)]
    minima = [-global_min(draw(m, n, (505, r))).value for r in range(reps)]
    stat = ks_2samp(maxima, minima)
    assert stat.pvalue > 0.01
