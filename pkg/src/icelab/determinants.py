"""Closed-form partition functions: Cauchy, Izergin-Korepin and relatives."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.linalg

MIN_GAP = 1e-8


class CoincidentParameterError(ValueError):
    """Two parameters that must be distinct (or a pole) are too close."""


@dataclass(frozen=True)
class SpectralVectors:
    x: np.ndarray
    y: np.ndarray
    t: complex

    def __init__(self, x, y, t):
        x = np.atleast_1d(np.asarray(x, dtype=complex))
        y = np.atleast_1d(np.asarray(y, dtype=complex))
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and y must be vectors of equal length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "t", complex(t))

    @property
    def n(self) -> int:
        return len(self.x)

    def u(self) -> np.ndarray:
        return np.outer(self.x, self.y)

    def check(self, distinct: bool = True) -> None:
        if distinct:
            for name, v in (("x", self.x), ("y", self.y)):
                gap = _min_gap(v)
                if gap < MIN_GAP:
                    raise CoincidentParameterError(
                        f"{name} entries closer than {MIN_GAP:g} (gap {gap:.3g}); "
                        "perturb the parameters or use a confluent formula"
                    )
        u = self.u()
        if np.any(np.abs(1 - u) < MIN_GAP) or np.any(np.abs(1 - self.t * u) < MIN_GAP):
            raise CoincidentParameterError("some 1 - x_i y_j or 1 - t x_i y_j vanishes")

    def without_unit_pairs(self) -> "SpectralVectors":
        """Drop x_i, y_j whenever x_i y_j = 1 (to within MIN_GAP).

        At such a pair the vertex (i, j) is forced to be c1 and both
        determinant formulas reduce to the size N-1 case with x_i and y_j
        removed, by symmetry in the x's and in the y's.
        """
        x, y = list(self.x), list(self.y)
        while x:
            u = np.abs(1 - np.outer(x, y))
            i, j = np.unravel_index(np.argmin(u), u.shape)
            if u[i, j] >= MIN_GAP:
                break
            del x[i], y[j]
        return SpectralVectors(x, y, self.t) if len(x) < self.n else self


def _min_gap(v: np.ndarray) -> float:
    if len(v) < 2:
        return np.inf
    d = np.abs(v[:, None] - v[None, :])
    d[np.diag_indices(len(v))] = np.inf
    return float(d.min())


def _vandermonde(v: np.ndarray) -> complex:
    out = 1.0 + 0j
    for i, j in combinations(range(len(v)), 2):
        out *= v[i] - v[j]
    return out


def lu_det(m: np.ndarray) -> complex:
    """Determinant via partially pivoted LU."""
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return 1.0 + 0j
    lu, piv = scipy.linalg.lu_factor(m, check_finite=True)
    sign = (-1) ** int(np.sum(piv != np.arange(len(piv))))
    return complex(sign * np.prod(np.diag(lu)))


def cauchy_det(a, b) -> tuple[complex, complex]:
    """det[1/(a_j - b_i)] by LU, and by the product formula.

    Returns ``(lu_value, product_value)``.
    """
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    if _min_gap(a) < MIN_GAP or _min_gap(b) < MIN_GAP:
        raise CoincidentParameterError("a's and b's must be pairwise distinct")
    diff = a[None, :] - b[:, None]  # [i, j] = a_j - b_i
    if np.any(np.abs(diff) < MIN_GAP):
        raise CoincidentParameterError("some a_j coincides with some b_i")
    lu_value = lu_det(1.0 / diff)
    num = 1.0 + 0j
    for i, j in combinations(range(len(a)), 2):
        num *= (a[i] - a[j]) * (b[j] - b[i])
    den = np.prod(a[:, None] - b[None, :])
    return lu_value, complex(num / den)


def _prefactor(sv: SpectralVectors) -> complex:
    u = sv.u()
    return complex(np.prod(1 - u) / (_vandermonde(sv.x) * _vandermonde(sv.y)))


def ik_matrix(sv: SpectralVectors) -> np.ndarray:
    u = sv.u()
    t = sv.t
    return (1 - t) * u / ((1 - u) * (1 - t * u))


def _first_row_dd(sv: SpectralVectors, k: int, a: complex) -> np.ndarray:
    """Divided differences over y_1..y_l (l = 1..N) of y -> (a y)^{k-1} / prod_{m<k} (1 - a x_m y).

    These are the first row of f(J) with J the bidiagonal matrix carrying y on
    its diagonal and ones above it, so only triangular solves are needed.
    """
    n = sv.n
    J = np.diag(sv.y) + np.diag(np.ones(n - 1, dtype=complex), 1)
    row = np.zeros(n, dtype=complex)
    row[0] = 1.0
    for _ in range(k - 1):
        row = a * (row @ J)
    eye = np.eye(n, dtype=complex)
    for m in range(k):
        row = scipy.linalg.solve_triangular(eye - a * sv.x[m] * J, row, trans="T")
    return row


def divided_difference_matrix(sv: SpectralVectors, w: complex = 1.0) -> np.ndarray:
    """E with det E = det[1/(1 - x_i y_j) - w/(1 - t x_i y_j)] / (V(x) V(y)).

    Rows are x-divided differences, which for 1/(1 - a x) have the closed
    form a^{k-1} / prod_{m<=k} (1 - a x_m); columns are y-divided differences.
    No Vandermonde cancellation occurs, so nearly coincident parameters cost
    no accuracy.
    """
    return np.array([_first_row_dd(sv, k, 1.0) - w * _first_row_dd(sv, k, sv.t)
                     for k in range(1, sv.n + 1)])


def ik_rhs(sv: SpectralVectors) -> complex:
    """Izergin-Korepin determinant for the inhomogeneous DWBC partition function.

    The entries (1-t)u / ((1-u)(1-tu)) equal 1/(1-u) - 1/(1-tu); the ratio of
    the determinant to the Vandermonde factors is evaluated through
    :func:`divided_difference_matrix`.
    """
    sv = sv.without_unit_pairs()
    sv.check()
    if sv.n == 0:
        return 1.0 + 0j
    return complex(np.prod(1 - sv.u()) * lu_det(divided_difference_matrix(sv, 1.0)))


def ik_rhs_direct(sv: SpectralVectors) -> complex:
    """Same quantity from the plain determinant divided by the Vandermonde factors."""
    sv.check()
    return _prefactor(sv) * lu_det(ik_matrix(sv))


def ik_condition_number(sv: SpectralVectors) -> float:
    return float(np.linalg.cond(ik_matrix(sv)))


def ff_product(sv: SpectralVectors) -> complex:
    """Free-fermion (t = -1) product form; coincident parameters are allowed."""
    if abs(sv.t + 1) > 1e-14:
        raise ValueError("ff_product needs t = -1")
    u = sv.u()
    if np.any(np.abs(1 + u) < MIN_GAP):
        raise CoincidentParameterError("pole: some 1 + x_i y_j vanishes")
    x, y = sv.x, sv.y
    out = np.prod(2 * x * y)
    for i, j in combinations(range(sv.n), 2):
        out *= (x[i] + x[j]) * (y[i] + y[j])
    return complex(out / np.prod(1 + u))


def free_ik_matrix(sv: SpectralVectors, w: complex) -> np.ndarray:
    u = sv.u()
    t = sv.t
    return (1 - w - (t - w) * u) / ((1 - u) * (1 - t * u))


def free_ik_rhs(sv: SpectralVectors, w: complex) -> complex:
    """Determinant for E[(1-w)(1-wt)...(1-wt^{H_N-1})] with free exits."""
    sv = sv.without_unit_pairs()
    sv.check()
    if sv.n == 0:
        return 1.0 + 0j
    return complex(np.prod(1 - sv.u()) * lu_det(divided_difference_matrix(sv, w)))


def free_ik_rhs_direct(sv: SpectralVectors, w: complex) -> complex:
    sv.check()
    return _prefactor(sv) * lu_det(free_ik_matrix(sv, w))


def free_ik_at_zero(y, t, w, eps=(1e-2, 5e-3, 2.5e-3)) -> complex:
    """Limit x -> 0 of free_ik_rhs along x_i = eps * i, by Richardson extrapolation.

    The value is a polynomial in eps near 0; with three halvings we eliminate
    the linear and quadratic terms.
    """
    y = np.asarray(y, dtype=complex)
    n = len(y)
    vals = []
    for e in eps:
        x = e * np.arange(1, n + 1)
        vals.append(free_ik_rhs(SpectralVectors(x, y, t), w))
    # Neville-style extrapolation to eps = 0 through the sample points
    h = np.asarray(eps, dtype=float)
    table = list(vals)
    m = len(h)
    for k in range(1, m):
        for i in range(m - k):
            table[i] = (h[i + k] * table[i] - h[i] * table[i + 1]) / (h[i + k] - h[i])
    return complex(table[0])


def schur_sum_form(n: int, x, y, t, w, cutoff: int | None = None) -> tuple[complex, float]:
    """Truncated Schur-measure expectation of prod_i (1 - w t^{lambda_i + N - i}).

    Returns ``(value, tail_bound)``; see :func:`icelab.schur.schur_measure_expect`.
    """
    from .schur import default_cutoff, schur_measure_expect

    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if len(x) != n or len(y) != n:
        raise ValueError("x and y must have length N")

    def f(lam):
        out = 1.0 + 0j
        for i, part in enumerate(lam):
            out *= 1 - w * t ** (part + n - 1 - i)
        return out

    return schur_measure_expect(n, x, y, f, cutoff)
