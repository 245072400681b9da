import numpy as np
import pytest
from scipy import stats

from icelab.enumeration import height_histogram
from icelab.stochastic import (
    ProbabilityRangeError,
    StochasticParams,
    centering,
    height_statistics,
    inhomogeneous_configuration,
    inhomogeneous_sample,
    ks_distance,
    limit_cdf,
    sample_configuration,
    sample_heights,
    scale_constant_height_form,
    scale_constant_sigma_form,
    sigma_consistency,
    standardize,
)


def test_stochastic_weights_sum_to_one():
    p = StochasticParams(3, 0.5, 0.5, seed=1)
    assert p.b1 == pytest.approx(2 / 3) and p.b2 == pytest.approx(1 / 3)


def test_out_of_range_parameters():
    with pytest.raises(ProbabilityRangeError):
        StochasticParams(3, 0.5, 1.5)


def test_single_vertex_law():
    p = StochasticParams(1, 0.5, 0.5, seed=3, samples=40_000)
    h = sample_heights(p)
    assert set(np.unique(h)) <= {0, 1}
    assert abs(h.mean() - p.b1) < 4 * np.sqrt(p.b1 * (1 - p.b1) / len(h))


@pytest.mark.parametrize("n,u,t", [(3, 0.5, 0.5), (4, 0.3, 0.2)])
def test_height_law_matches_enumeration(n, u, t):
    exact = height_histogram(n, [1.0] * n, [u] * n, t)
    h = sample_heights(StochasticParams(n, u, t, seed=5, samples=100_000))
    counts = np.bincount(h, minlength=n + 1)
    probs = np.array([exact[k] for k in range(n + 1)])
    keep = probs > 0
    assert counts[~keep].sum() == 0
    chi2 = stats.chisquare(counts[keep], probs[keep] / probs[keep].sum() * counts.sum())
    assert chi2.pvalue > 1e-4


def test_inhomogeneous_law_matches_enumeration():
    x, y, t = [0.9, 0.5, 0.7], [0.6, 0.8, 0.3], 0.4
    exact = height_histogram(3, x, y, t)
    h = inhomogeneous_sample(3, x, y, t, seed=7, samples=100_000)
    counts = np.bincount(h, minlength=4)
    probs = np.array([exact[k] for k in range(4)])
    assert stats.chisquare(counts, probs * counts.sum()).pvalue > 1e-4


def test_configuration_consistent_with_heights():
    p = StochasticParams(6, 0.4, 0.5, seed=11, samples=20)
    h = sample_heights(p)
    for i in range(5):
        cfg, hs = sample_configuration(p, i)
        cfg.validate()
        assert hs.h == h[i] == cfg.top_exits()
    cfg, _ = inhomogeneous_configuration(3, [0.5] * 3, [0.5] * 3, 0.3, seed=1)
    cfg.validate()


def test_reproducible_by_seed():
    p = StochasticParams(20, 0.25, 0.5, seed=99, samples=50)
    assert np.array_equal(sample_heights(p), sample_heights(p))
    assert np.array_equal(sample_heights(p, start=10)[:5], sample_heights(p)[10:15])


def test_scale_constants_agree():
    assert sigma_consistency(np.linspace(0.01, 0.99, 99)) < 1e-12
    assert scale_constant_height_form(0.25) == pytest.approx(scale_constant_sigma_form(0.25))


def test_standardize_and_limit_cdf():
    assert centering(0.25) == pytest.approx(1 / 3)
    assert standardize(np.array([100.0]), 300, 0.25)[0] == pytest.approx(0.0)
    assert limit_cdf(np.array([-9.0, 11.0])).tolist() == [0.0, 1.0]
    g = np.linspace(-3, 3, 13)
    assert np.all(np.diff(limit_cdf(g)) > 0)


def test_ks_distance_with_ties():
    assert ks_distance(np.array([0.0, 0.0]), lambda v: np.where(v >= 0, 0.5, 0.0)) == pytest.approx(0.5)


@pytest.mark.slow
def test_height_statistics_moderate_size():
    b = height_statistics(StochasticParams(300, 0.25, 0.5, seed=1, samples=1000))
    assert len(b) == 1000
    assert b.meta["ks_vs_F2"] < 0.25
