import math

import numpy as np
import pytest
from scipy import stats

from icelab.core import BoundaryData, SixVertexConfig, WeightTable
from icelab.dwbc_mcmc import (
    ChainState,
    InsufficientSamplesError,
    McmcParams,
    check_identities,
    corners_extract,
    delta_zero_gamma,
    delta_zero_weights,
    gue_corners_test,
    integrated_autocorrelation,
    mcmc_run,
    run_recorded,
)
from icelab.enumeration import enumerate_configs
from icelab.stochastic import config_code


def test_delta_zero_family():
    for th in (0.3, 1.0, 2.5):
        w = delta_zero_weights(th)
        assert abs(w.delta()) < 1e-14
    w = delta_zero_weights(math.pi / 2)
    assert w.c1 * w.c2 == pytest.approx(2.0)
    assert delta_zero_gamma(math.pi / 2) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        delta_zero_weights(math.pi)


def test_bad_weight_spec():
    with pytest.raises(ValueError):
        McmcParams(4, "nonsense")


def test_chain_preserves_validity():
    for cfg in mcmc_run(McmcParams(6, "dz:1.2", burnin=5, seed=2), 10):
        cfg.validate()


def _chain_law(weights, table, n=3, samples=60_000):
    res = enumerate_configs(n, n, BoundaryData.dwbc(n), table, keep_configs=True)
    exact = {config_code(SixVertexConfig.from_types(t)): (w / res.partition_function).real
             for t, w in res.configs}
    st = ChainState.start(McmcParams(n, weights, seed=4, burnin=50))
    st.sweep(50)
    seen = {}
    for _ in range(samples):
        st.sweep(1)
        c = config_code(st.config())
        seen[c] = seen.get(c, 0) + 1
    return exact, seen


@pytest.mark.parametrize("weights", ["uniform", "dz:1.0"])
def test_stationary_law_matches_enumeration(weights):
    table = WeightTable.uniform() if weights == "uniform" else delta_zero_weights(1.0)
    exact, seen = _chain_law(weights, table)
    assert set(seen) <= set(exact)
    keys = sorted(exact)
    obs = np.array([seen.get(k, 0) for k in keys])
    exp = np.array([exact[k] for k in keys]) * obs.sum()
    # successive sweeps are correlated, so only a coarse chi-square bound is meaningful
    assert stats.chisquare(obs, exp).statistic / len(keys) < 10
    assert np.max(np.abs(obs / obs.sum() - exp / obs.sum())) < 0.01


def test_identity_configuration_observables():
    obs = corners_extract(SixVertexConfig.dwbc_identity(5), 3)
    # holes pile up at the left edge: weakly but not strictly interlaced
    assert obs.Xi == [[1], [1, 2], [1, 2, 3]]
    assert list(obs.c1_counts) == [1, 1, 1]
    assert obs.interlacing() and not obs.generic()


def test_autocorrelation_of_ar1():
    rng = np.random.default_rng(0)
    rho, n = 0.8, 200_000
    x = np.empty(n)
    x[0] = 0
    e = rng.normal(size=n)
    for i in range(1, n):
        x[i] = rho * x[i - 1] + e[i]
    assert integrated_autocorrelation(x) == pytest.approx((1 + rho) / (1 - rho), rel=0.1)
    assert integrated_autocorrelation(np.ones(10)) == 1.0


def test_identities_hold_on_short_run():
    st = ChainState.start(McmcParams(16, seed=3))
    st.sweep(500)
    rep = check_identities(run_recorded(st, 3, 300, 2))
    assert rep.ok
    assert rep.samples == 300


def test_chain_is_reproducible():
    a = [config_code(c) for c in mcmc_run(McmcParams(4, seed=8, burnin=3), 5)]
    b = [config_code(c) for c in mcmc_run(McmcParams(4, seed=8, burnin=3), 5)]
    assert a == b


def test_sample_budget_guard():
    with pytest.raises(InsufficientSamplesError):
        gue_corners_test(McmcParams(8, seed=1, burnin=10), k=2, target=500,
                         pilot_sweeps=200, max_sweeps=100)


@pytest.mark.slow
def test_small_corners_run():
    rep = gue_corners_test(McmcParams(24, seed=5), k=2, target=300, reference=2000)
    assert rep.identities.ok
    assert rep.row_exact_fraction[0] == 1.0
    assert rep.ks_row1_normal < 0.15
