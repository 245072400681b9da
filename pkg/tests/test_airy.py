import numpy as np
import pytest
from scipy.special import airy as scipy_airy

from icelab.airy import (
    AiryRangeError,
    ConvergenceError,
    airy_fn,
    airy_kernel,
    airy_kernel_integral,
    airy_moment_closed_form,
    airy_moment_lhs,
    airy_ode_residual,
    kernel_matrix,
    switchover_error,
    tracy_widom_f2,
)


def test_values_match_scipy_across_range():
    x = np.linspace(-40, 40, 4001)
    ai, aip = airy_fn(x)
    ref_ai, ref_aip, _, _ = scipy_airy(x)
    scale = np.maximum(1.0, np.abs(x) ** 0.25)
    assert np.max(np.abs(ai - ref_ai) / scale) < 1e-12
    assert np.max(np.abs(aip - ref_aip) / scale**2) < 1e-11


def test_known_values_at_origin():
    a, ap = airy_fn(0.0)
    assert a == pytest.approx(0.3550280538878172, abs=1e-15)
    assert ap == pytest.approx(-0.2588194037928068, abs=1e-15)


def test_switchover_is_small():
    assert switchover_error() < 1e-12


def test_ode_residual():
    x = np.linspace(-20, 10, 301)
    assert np.max(airy_ode_residual(x)) < 1e-8


@pytest.mark.parametrize("bad", [41.0, -41.0, np.nan])
def test_out_of_range_rejected(bad):
    with pytest.raises(AiryRangeError):
        airy_fn(bad)


def test_kernel_symmetric_and_diagonal_limit():
    x = np.linspace(-5, 3, 9)
    k = kernel_matrix(x)
    assert np.allclose(k, k.T, atol=1e-15)
    h = 1e-6
    assert airy_kernel(1.3, 1.3) == pytest.approx(float(airy_kernel(1.3, 1.3 + h)), abs=1e-6)


@pytest.mark.parametrize("x,y", [(0.0, 1.0), (-2.0, 0.5), (1.5, 1.5)])
def test_kernel_integral_form(x, y):
    assert abs(airy_kernel_integral(x, y) - float(airy_kernel(x, y))) < 1e-8


def test_f2_is_a_distribution_function():
    s = np.linspace(-8, 5, 27)
    f = tracy_widom_f2(s)
    assert np.all(np.diff(f) >= -1e-14)
    assert f[0] < 1e-10 and f[-1] > 1 - 1e-8


def test_f2_reference_value():
    # F2(-2) from an independent high-order Nystrom run in the literature: 0.41322...
    assert tracy_widom_f2(-2.0) == pytest.approx(0.4132241425, abs=1e-8)


def test_f2_node_doubling_check_passes():
    tracy_widom_f2(np.array([-3.0, 0.0, 2.0]), 48, check=True)


def test_f2_rejects_low_order():
    with pytest.raises(ValueError):
        tracy_widom_f2(0.0, 16)


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_first_moment_closed_form(s):
    assert abs(airy_moment_lhs(s).value - airy_moment_closed_form(s)) < 1e-6


def test_moment_rejects_nonpositive():
    with pytest.raises(ValueError):
        airy_moment_lhs(-1.0)


def test_tail_guard():
    with pytest.raises(ConvergenceError):
        airy_moment_lhs(0.05, lower=-5.0)
