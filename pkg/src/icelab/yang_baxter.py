"""Cross vertex, R-matrix and exhaustive Yang-Baxter checks.

Vertex weights are indexed as ``w(i1, j1; i2, j2)`` with ``i1`` the bottom
edge, ``j1`` the left edge, ``i2`` the top edge and ``j2`` the right edge.
In the R-matrix language the same weight sits at entry
``R[(j2, i2), (j1, i1)]`` of a 4 x 4 matrix over the basis
``e0 e0, e0 e1, e1 e0, e1 e1`` (0 = no path, 1 = path).

Tensor legs of the 8 x 8 operators: leg 1 is the bottom line, leg 2 the
middle line and leg 3 the top line of the three-line picture.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import SINGULAR_TOL, SingularParameterError, SpectralParams, weights_from_spectral
from .enumeration import dwbc_partition

BOUNDARIES = tuple(itertools.product((0, 1), repeat=6))


def _weight_tensor(u: complex, t: complex) -> np.ndarray:
    """w[i1, j1, i2, j2] with zeros off the six allowed quadruples."""
    w = weights_from_spectral(SpectralParams(u, t))
    out = np.zeros((2, 2, 2, 2), dtype=complex)
    out[0, 0, 0, 0] = w.a1
    out[1, 1, 1, 1] = w.a2
    out[1, 0, 1, 0] = w.b1
    out[0, 1, 0, 1] = w.b2
    out[1, 0, 0, 1] = w.c1
    out[0, 1, 1, 0] = w.c2
    return out


@dataclass(frozen=True)
class CrossVertex:
    """The tilted vertex joining two lines with spectral parameters u and v."""

    u: complex
    v: complex
    t: complex

    @property
    def ratio(self) -> complex:
        return self.u / self.v

    def tensor(self) -> np.ndarray:
        return _weight_tensor(self.ratio, self.t)

    def __call__(self, i1: int, j1: int, i2: int, j2: int) -> complex:
        return complex(self.tensor()[i1, j1, i2, j2])


@dataclass(frozen=True)
class RMatrix:
    u: complex
    t: complex

    def matrix(self) -> np.ndarray:
        w = _weight_tensor(self.u, self.t)
        r = np.zeros((4, 4), dtype=complex)
        for i1, j1, i2, j2 in itertools.product((0, 1), repeat=4):
            r[2 * j2 + i2, 2 * j1 + i1] = w[i1, j1, i2, j2]
        return r

    def on_legs(self, l: int, p: int) -> np.ndarray:
        """8 x 8 operator acting as R on tensor factors l, p (1-based) and trivially on the third."""
        if l == p or not {l, p} <= {1, 2, 3}:
            raise ValueError("legs must be two distinct values in 1..3")
        r = self.matrix().reshape(2, 2, 2, 2)  # [out_l, out_p, in_l, in_p]
        other = ({1, 2, 3} - {l, p}).pop()
        out = np.zeros((2,) * 6, dtype=complex)
        for a, b, c, d, e in itertools.product((0, 1), repeat=5):
            o = [0, 0, 0]
            i = [0, 0, 0]
            o[l - 1], o[p - 1], o[other - 1] = a, b, e
            i[l - 1], i[p - 1], i[other - 1] = c, d, e
            out[tuple(o) + tuple(i)] = r[a, b, c, d]
        return out.reshape(8, 8)


def _check_params(u, v, t):
    for val, name in ((1 - t * u, "1 - t u"), (1 - t * v, "1 - t v"), (1 - t * u / v, "1 - t u/v")):
        if abs(val) < SINGULAR_TOL:
            raise SingularParameterError(f"{name} vanishes")
    if abs(v) < SINGULAR_TOL:
        raise SingularParameterError("v must be nonzero")


def ybe_residual(u: complex, v: complex, t: complex, boundary) -> complex:
    """Left minus right side of the three-vertex identity for one boundary (i1, i2, i3, j1, j2, j3)."""
    _check_params(u, v, t)
    i1, i2, i3, j1, j2, j3 = boundary
    wr = _weight_tensor(u / v, t)
    wu = _weight_tensor(u, t)
    wv = _weight_tensor(v, t)
    lhs = 0j
    rhs = 0j
    for k1, k2, k3 in itertools.product((0, 1), repeat=3):
        lhs += wr[i2, i1, k2, k1] * wu[i3, k1, k3, j1] * wv[k3, k2, j3, j2]
        rhs += wv[i3, i2, k3, k2] * wu[k3, i1, j3, k1] * wr[k2, k1, j2, j1]
    return lhs - rhs


def ybe_scan(u: complex, v: complex, t: complex) -> tuple[float, tuple]:
    """Largest |residual| over all 64 boundaries and the boundary attaining it."""
    res = [abs(ybe_residual(u, v, t, b)) for b in BOUNDARIES]
    k = int(np.argmax(res))
    return float(res[k]), BOUNDARIES[k]


def ybe_matrix_check(u: complex, v: complex, t: complex) -> float:
    """max |R23(v) R13(u) R12(u/v) - R12(u/v) R13(u) R23(v)|."""
    _check_params(u, v, t)
    r12 = RMatrix(u / v, t).on_legs(1, 2)
    r13 = RMatrix(u, t).on_legs(1, 3)
    r23 = RMatrix(v, t).on_legs(2, 3)
    return float(np.max(np.abs(r23 @ r13 @ r12 - r12 @ r13 @ r23)))


def z_symmetry_check(x, y, t: complex, swap: int, which: str = "y") -> float:
    """|Z - Z'| where Z' has entries ``swap`` and ``swap + 1`` of x or y exchanged."""
    x = list(x)
    y = list(y)
    n = len(x)
    if len(y) != n:
        raise ValueError("x and y must have equal length")
    if n == 1:
        return 0.0
    if not 0 <= swap < n - 1:
        raise ValueError("swap index out of range")
    z = dwbc_partition(n, x, y, t)
    seq = list(y if which == "y" else x)
    seq[swap], seq[swap + 1] = seq[swap + 1], seq[swap]
    z2 = dwbc_partition(n, x, seq, t) if which == "y" else dwbc_partition(n, seq, y, t)
    return float(abs(z - z2))
