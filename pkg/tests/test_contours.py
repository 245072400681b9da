import math

import numpy as np
import pytest

from conftest import distinct
from icelab.airy import airy_moment_closed_form, airy_moment_lhs
from icelab.contours import (
    CircleContour,
    ContourError,
    F0,
    F0_prime,
    airy_laplace_rhs,
    critical_point,
    default_radii,
    oneq_contour_value,
    oneq_limit_value,
    oneq_scaling_sequence,
    qsum_contour,
    qsum_residue_sum,
    scaling_constants,
    schur_qsum_contour,
)
from icelab.schur import laplace_observable_bruteforce, qsum_bruteforce


def test_certificate_flags_misplaced_pole():
    c = CircleContour(0j, 1.0)
    assert c.certify(inside=[0.5], outside=[2.0]).ok
    cert = c.certify(inside=[1.5])
    assert not cert.ok
    with pytest.raises(ContourError):
        cert.require()


def test_trapezoid_integrates_residue():
    z, fac = CircleContour(0.2 + 0j, 0.5).points(64)
    assert abs(np.sum(fac / (z - 0.3)) - 1) < 1e-14
    assert abs(np.sum(fac / (z - 2.0))) < 1e-14


@pytest.mark.parametrize("n", [1, 2, 3])
def test_single_q_matches_bruteforce(rng, n):
    x = distinct(rng, n, 0.1, 0.5)
    y = distinct(rng, n, 0.1, 0.5)
    q = 0.6
    ref = laplace_observable_bruteforce(n, x, y, [q])
    assert abs(schur_qsum_contour(n, x, y, [q]).value - ref) < 1e-9 * abs(ref)


def test_two_q_matches_bruteforce(rng):
    x = distinct(rng, 2, 0.1, 0.5)
    y = distinct(rng, 2, 0.1, 0.5)
    ref = laplace_observable_bruteforce(2, x, y, [0.7, 0.4])
    val = schur_qsum_contour(2, x, y, [0.7, 0.4]).value
    assert abs(val - ref) < 1e-8 * abs(ref)


def test_residue_and_contour_forms_agree(rng):
    x = distinct(rng, 3, 0.2, 0.6)
    y = distinct(rng, 3, 0.1, 0.5)
    q = 0.5
    ref = qsum_bruteforce(3, x, y, [q])
    assert abs(qsum_residue_sum(x, y, q) - ref) < 1e-10
    assert abs(qsum_contour(x, y, q).value - ref) < 1e-10


def test_default_radii_respect_nesting():
    x, y = [0.3, 0.4], [0.5, 0.2]
    r1, r2 = default_radii(x, y, [0.8, 0.6])
    assert 0.4 < r2 < 0.8 * r1 and r1 < 1 / (0.8 * 0.5)
    with pytest.raises(ContourError):
        default_radii([2.0], [0.6], [0.5, 0.9])


def test_bad_nesting_rejected():
    with pytest.raises(ContourError):
        schur_qsum_contour(1, [0.2], [0.2], [0.5, 0.6],
                           contours=[CircleContour(0j, 0.5), CircleContour(0j, 0.45)])


def test_scaling_constants_and_critical_point():
    u = 0.25
    alpha, sigma = scaling_constants(u)
    assert alpha == pytest.approx(1 / 3)
    assert sigma == pytest.approx(0.25 ** (1 / 6) * 0.5 ** (1 / 3) / 1.5)
    zc = critical_point(u)
    assert F0(zc, u) == pytest.approx(-alpha)
    assert abs(F0_prime(zc, u)) < 1e-14


def test_oneq_contour_against_bruteforce():
    n, q, u = 3, 0.6, 0.3
    ref = laplace_observable_bruteforce(n, np.ones(n), np.full(n, u), [q])
    val = oneq_contour_value(n, q, u).value
    assert abs(val - ref) < 1e-9 * abs(ref)


def test_oneq_sequence_approaches_limit():
    s, u = 1.0, 0.25
    lim, _ = oneq_limit_value(s, u)
    gaps = [abs(v / lim - 1) for _, v, _ in oneq_scaling_sequence(s, u, [125, 1000, 8000])]
    assert gaps[2] < gaps[0] and gaps[2] < 0.05


@pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
def test_airy_laplace_single(s):
    assert abs(airy_laplace_rhs(s).value.real - airy_moment_closed_form(s)) < 1e-8


def test_airy_laplace_pair():
    lhs = airy_moment_lhs([1.0, 1.5]).value
    rhs = airy_laplace_rhs([1.0, 1.5], v=[-0.7, 0.7]).value.real
    assert abs(lhs - rhs) < 1e-4


def test_airy_lines_must_separate():
    with pytest.raises(ContourError):
        airy_laplace_rhs([1.0, 1.0], v=[0.0, 0.5])
