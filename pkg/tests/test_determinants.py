import numpy as np
import pytest
from conftest import distinct

from icelab.determinants import (
    CoincidentParameterError, SpectralVectors, cauchy_det, ff_product, free_ik_at_zero, free_ik_rhs,
    free_ik_rhs_direct, ik_condition_number, ik_rhs, ik_rhs_direct, schur_sum_form,
)
from icelab.enumeration import dwbc_partition, stochastic_free_observable


def test_cauchy_small():
    for a, b, want in (([5], [2], 1 / 3), ([2, 3], [0, 1], -1 / 12)):
        lu, prod = cauchy_det(a, b)
        assert abs(lu - want) < 1e-15 and abs(prod - want) < 1e-15


def test_cauchy_random_complex(rng):
    a = 0.9 * np.exp(2j * np.pi * np.arange(8) / 8) * rng.uniform(0.5, 1, 8)
    b = 0.3 * np.exp(2j * np.pi * (np.arange(8) + 0.5) / 8) * rng.uniform(0.5, 1, 8)
    lu, prod = cauchy_det(a, b)
    assert abs(lu - prod) < 1e-10 * abs(prod)


def test_ik_base_case():
    x, y, t = 0.3, 0.8, 0.4
    assert abs(ik_rhs(SpectralVectors([x], [y], t)) - (1 - t) * x * y / (1 - t * x * y)) < 1e-15


def test_ik_against_enumeration(rng):
    for n in range(1, 5):
        for _ in range(20):
            x, y = distinct(rng, n, 0.1, 1.0), distinct(rng, n, 0.1, 1.0)
            t = rng.uniform(0.05, 0.95)
            z = dwbc_partition(n, x, y, t)
            assert abs(ik_rhs(SpectralVectors(x, y, t)) - z) < 1e-10 * abs(z)


def test_nearly_coincident_parameters_stay_accurate():
    x = np.array([0.3, 0.301, 0.302, 0.303])
    y = np.array([0.5, 0.501, 0.9, 0.901])
    sv = SpectralVectors(x, y, 0.4)
    z = dwbc_partition(4, x, y, 0.4)
    assert abs(ik_rhs(sv) - z) < 1e-12 * abs(z)
    assert ik_condition_number(sv) > 1e8  # the plain determinant is badly conditioned here
    assert abs(ik_rhs_direct(sv) - z) > abs(ik_rhs(sv) - z)


def test_coincident_rejected():
    with pytest.raises(CoincidentParameterError):
        ik_rhs(SpectralVectors([0.3, 0.3], [0.1, 0.2], 0.5))


def test_recursion_property(rng):
    for n in range(2, 6):
        x, y = distinct(rng, n, 0.2, 0.9), distinct(rng, n, 0.2, 0.9)
        t = rng.uniform(0.1, 0.9)
        x[-1] = 1 / y[-1]
        full = ik_rhs(SpectralVectors(x, y, t))
        part = ik_rhs(SpectralVectors(x[:-1], y[:-1], t))
        assert abs(full - part) < 1e-10 * abs(part)


def test_permutation_invariance(rng):
    x, y = distinct(rng, 4), distinct(rng, 4)
    sv, sp = SpectralVectors(x, y, 0.3), SpectralVectors(x[::-1], y, 0.3)
    assert abs(ik_rhs(sv) - ik_rhs(sp)) < 1e-10 * abs(ik_rhs(sv))
    w = 0.4 + 0.3j
    assert abs(free_ik_rhs(sv, w) - free_ik_rhs(sp, w)) < 1e-10 * abs(free_ik_rhs(sv, w))


def test_degree_in_last_variable(rng):
    n = 3
    x, y, t = distinct(rng, n, 0.1, 0.5), distinct(rng, n, 0.1, 0.5), 0.4
    xs = np.linspace(0.6, 0.9, n + 2)
    vals = []
    for xn in xs:
        xx = x.copy()
        xx[-1] = xn
        vals.append(ik_rhs(SpectralVectors(xx, y, t)).real * np.prod(1 - t * xn * y))
    coef = np.polyfit(xs, vals, n + 1)
    assert abs(coef[0]) < 1e-8 * np.max(np.abs(coef))


def test_free_fermion_product(rng):
    x, y = [0.4], [0.7]
    assert abs(ff_product(SpectralVectors(x, y, -1)) - 2 * 0.28 / 1.28) < 1e-15
    x, y = distinct(rng, 3), distinct(rng, 3)
    assert abs(ff_product(SpectralVectors(x, y, -1)) - ik_rhs(SpectralVectors(x, y, -1))) < 1e-10
    z = dwbc_partition(3, [0.6] * 3, [1.0] * 3, -1)
    assert abs(ff_product(SpectralVectors([0.6] * 3, [1.0] * 3, -1)) - z) < 1e-10 * abs(z)


def test_free_ik_against_enumeration(rng):
    for n in range(1, 5):
        for _ in range(10):
            x, y = distinct(rng, n, 0.1, 1.0), distinct(rng, n, 0.1, 1.0)
            t = rng.uniform(0.05, 0.95)
            w = 2 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
            ref = stochastic_free_observable(n, x, y, t, w)
            assert abs(free_ik_rhs(SpectralVectors(x, y, t), w) - ref) < 1e-10 * abs(ref)
            assert abs(free_ik_rhs_direct(SpectralVectors(x, y, t), w) - ref) < 1e-6 * abs(ref)


def test_free_ik_reduces_to_ik(rng):
    sv = SpectralVectors(distinct(rng, 3), distinct(rng, 3), 0.35)
    assert abs(free_ik_rhs(sv, 1.0) - ik_rhs(sv)) < 1e-14


@pytest.mark.parametrize("n", [1, 2, 3])
def test_zero_limit(rng, n):
    y, t, w = distinct(rng, n, 0.2, 0.8), 0.45, 0.3 - 0.6j
    want = np.prod([1 - w * t ** (n - i) for i in range(1, n + 1)])
    assert abs(free_ik_at_zero(y, t, w) - want) < 1e-6


def test_schur_sum_form():
    val, bound = schur_sum_form(2, [0.2, 0.3], [0.4, 0.5], 0.5, 0.7, cutoff=40)
    ref = free_ik_rhs(SpectralVectors([0.2, 0.3], [0.4, 0.5], 0.5), 0.7)
    assert abs(val - ref) < 1e-10 and bound < 1e-12
    one, _ = schur_sum_form(2, [0.2, 0.3], [0.4, 0.5], 0.5, 0.0)
    assert abs(one - 1) < 1e-13
    zero_x, _ = schur_sum_form(3, [0, 0, 0], [0.4, 0.5, 0.6], 0.5, 0.7)
    assert abs(zero_x - np.prod([1 - 0.7 * 0.5 ** (3 - i) for i in (1, 2, 3)])) < 1e-14
