import numpy as np
import pytest
from scipy import stats

from icelab.rmt import HermitianMatrix, corners_process, gue_corners_samples, gue_edge_check, sample_gue


def test_hermitian_roundtrip(rng):
    x = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    a = x + x.conj().T
    assert np.allclose(HermitianMatrix.from_dense(a).dense(), a)


def test_sample_reproducible():
    assert np.array_equal(sample_gue(5, 3).upper, sample_gue(5, 3).upper)


def test_gue_entry_variances():
    mats = np.array([sample_gue(3, 1, s).dense() for s in range(4000)])
    assert np.var(mats[:, 0, 0].real) == pytest.approx(1.0, abs=0.08)
    assert np.mean(np.abs(mats[:, 0, 1]) ** 2) == pytest.approx(1.0, abs=0.08)


def test_corners_interlace_and_trace():
    for s in range(50):
        m = sample_gue(6, 2, s)
        cs = corners_process(m, 6)
        assert cs.interlaced()
        assert np.allclose(cs.diagonal(), np.diag(m.dense()).real, atol=1e-10)


def test_top_corner_is_standard_normal():
    g = gue_corners_samples(2, 4000, seed=5)
    assert stats.kstest(g[:, 0, 0], "norm").statistic < 0.03
    assert np.isnan(g[0, 0, 1])


def test_corners_k_range():
    with pytest.raises(ValueError):
        corners_process(sample_gue(3, 1), 4)


def test_edge_small_run():
    rep = gue_edge_check(60, 300, seed=9)
    assert rep.ks < 0.12
    assert rep.min_gap > 0
    assert rep.mean == pytest.approx(-1.77, abs=0.3)
