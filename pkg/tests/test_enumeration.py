import numpy as np
import pytest

from icelab.core import BoundaryData, SpectralField, SpectralParams, WeightTable, weights_from_spectral
from icelab.determinants import SpectralVectors, free_ik_rhs, ik_rhs
from icelab.enumeration import (
    EnumerationLimitError, dwbc_partition, enumerate_configs, height_histogram,
    row_horizontal_count_bounds, stochastic_free_observable,
)


@pytest.mark.parametrize("n, count", [(1, 1), (2, 2), (3, 7), (4, 42), (5, 429)])
def test_dwbc_counts(n, count):
    res = enumerate_configs(n, n, BoundaryData.dwbc(n), WeightTable.uniform())
    assert res.count == count and abs(res.partition_function - count) < 1e-9


def test_base_case():
    x, y, t = 0.4, 0.7, 0.3
    assert abs(dwbc_partition(1, [x], [y], t) - (1 - t) * x * y / (1 - t * x * y)) < 1e-15


def test_two_by_two_against_determinant():
    z = dwbc_partition(2, [0.2, 0.3], [0.4, 0.5], 0.6)
    assert abs(z - ik_rhs(SpectralVectors([0.2, 0.3], [0.4, 0.5], 0.6))) < 1e-12 * abs(z)


def test_zero_parameter_kills_partition_function():
    assert dwbc_partition(3, [0.2, 0.0, 0.5], [0.4, 0.5, 0.6], 0.3) == 0


def test_kept_configs_sum_to_partition_function(rng):
    f = SpectralField(rng.uniform(0.1, 0.9, 3), rng.uniform(0.1, 0.9, 3), 0.4)
    res = enumerate_configs(3, 3, BoundaryData.dwbc(3), f, keep_configs=True)
    assert abs(sum(w for _, w in res.configs) - res.partition_function) < 1e-12 * abs(res.partition_function)


def test_infeasible_boundary_is_empty():
    bd = BoundaryData((0, 1), (0, 0), (1, 0), (0, 0))  # path would have to move left
    res = enumerate_configs(2, 2, bd, WeightTable.uniform())
    assert res.count == 0 and res.partition_function == 0


def test_size_limit():
    with pytest.raises(EnumerationLimitError):
        dwbc_partition(7, np.full(7, 0.5), np.full(7, 0.5), 0.5)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_row_count_bounds(n):
    rep = row_horizontal_count_bounds(n)
    assert rep["passed"] and rep["counterexample"] is None


def test_free_exit_normalisation_inhomogeneous(rng):
    for n in (2, 3, 4):
        f = SpectralField(rng.uniform(0, 1, n), rng.uniform(0, 1, n), rng.uniform(0.1, 0.9))
        res = enumerate_configs(n, n, BoundaryData.step_free(n), f)
        assert abs(res.partition_function - 1) < 1e-12


def test_free_observable_special_values():
    x, y, t = [0.3, 0.6], [0.5, 0.2], 0.4
    assert abs(stochastic_free_observable(2, x, y, t, 1.0) - dwbc_partition(2, x, y, t)) < 1e-14
    assert abs(stochastic_free_observable(2, x, y, t, 0.0) - 1) < 1e-14
    val = stochastic_free_observable(2, [1, 1], [0.3, 0.3], 0.5, 0.7)
    assert abs(val - free_ik_rhs(SpectralVectors([1, 1 + 1e-3], [0.3, 0.3 + 1e-3], 0.5), 0.7)) < 1e-2
    # exact comparison needs distinct parameters for the determinant
    x2, y2 = [1.0, 0.9], [0.3, 0.35]
    assert abs(stochastic_free_observable(2, x2, y2, 0.5, 0.7)
               - free_ik_rhs(SpectralVectors(x2, y2, 0.5), 0.7)) < 1e-12


def test_height_histogram_cases():
    x, y, t = 0.5, 0.6, 0.4
    w = weights_from_spectral(SpectralParams(x * y, t))
    h = height_histogram(1, [x], [y], t)
    assert abs(h[1] - w.b1.real) < 1e-15 and abs(h[0] - w.c1.real) < 1e-15
    h0 = height_histogram(3, [0, 0, 0], [0.2, 0.4, 0.6], t)
    assert abs(h0[3] - 1) < 1e-15
    h3 = height_histogram(3, [0.5] * 3, [1] * 3, 0.5)
    assert all(p >= 0 for p in h3.values()) and abs(sum(h3.values()) - 1) < 1e-12
