"""Airy function, Airy kernel and the Tracy-Widom GUE distribution.

Ai and Ai' are computed from three pieces:

* the Maclaurin series around 0;
* asymptotic expansions for x >= 12 and x <= -45;
* a table on [-45, 12] (step 1/4) filled by Taylor continuation of the
  Airy equation y'' = x y.  The negative half is stepped outward from the
  Maclaurin values at 0 (both solutions oscillate there, so the recursion is
  stable); the positive half is stepped down from the asymptotic values at
  x = 12, the direction in which Ai is dominant.

Arbitrary points are evaluated by a Taylor expansion from the nearest table
node.  The mismatch between the two halves at x = 0 is reported by
:func:`switchover_error`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
from scipy.special import gammaincc

AI0 = 0.35502805388781723926  # 1 / (3^(2/3) Gamma(2/3))
AIP0 = -0.25881940379280679840  # -1 / (3^(1/3) Gamma(1/3))

TABLE_LO = -45.0
TABLE_HI = 12.0
STEP = 0.25
TAYLOR_TERMS = 40
PUBLIC_RANGE = 40.0


class AiryRangeError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# building blocks


def _maclaurin(x: float) -> tuple[float, float]:
    """Ai, Ai' from the power series; accurate for |x| <= ~3."""
    # f = sum 3^k (1/3)_k x^{3k}/(3k)!, g = sum 3^k (2/3)_k x^{3k+1}/(3k+1)!
    f, g = 1.0, x
    fp, gp = 0.0, 1.0
    tf, tg = 1.0, x
    x3 = x**3
    for k in range(1, 60):
        tf *= x3 / ((3 * k - 1) * (3 * k))
        tg *= x3 / ((3 * k) * (3 * k + 1))
        f += tf
        g += tg
        fp += 3 * k * tf / x if x != 0 else 0.0
        gp += (3 * k + 1) * tg / x if x != 0 else 0.0
        if abs(tf) + abs(tg) < 1e-18 * (abs(f) + abs(g)):
            break
    c1, c2 = AI0, -AIP0
    return c1 * f - c2 * g, c1 * fp - c2 * gp


@lru_cache(maxsize=None)
def _asym_coeffs(n: int = 40) -> tuple[np.ndarray, np.ndarray]:
    u = np.empty(n)
    u[0] = 1.0
    for k in range(1, n):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
    v = np.array([-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(n)])
    v[0] = 1.0
    return u, v


def _truncated(c: np.ndarray, z: np.ndarray, sign: float = -1.0) -> np.ndarray:
    """sum_k sign^k c_k z^{-k}, stopped before terms start growing."""
    z = np.asarray(z, dtype=float)
    total = np.zeros_like(z)
    term_prev = np.full_like(z, np.inf)
    active = np.ones(z.shape, dtype=bool)
    zk = np.ones_like(z)
    for k in range(len(c)):
        term = (sign**k) * c[k] / zk
        grow = np.abs(term) > np.abs(term_prev)
        active &= ~grow
        total = np.where(active, total + term, total)
        term_prev = term
        zk = zk * z
    return total


def _asym_pos(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    u, v = _asym_coeffs()
    zeta = 2.0 / 3.0 * x**1.5
    e = np.exp(-zeta) / (2 * math.sqrt(math.pi))
    ai = e / x**0.25 * _truncated(u, zeta)
    aip = -e * x**0.25 * _truncated(v, zeta)
    return ai, aip


def _asym_neg(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ai(x), Ai'(x) for large negative x."""
    u, v = _asym_coeffs()
    y = -x
    zeta = 2.0 / 3.0 * y**1.5
    ph = zeta - math.pi / 4
    ue, uo = u[0::2], u[1::2]
    ve, vo = v[0::2], v[1::2]
    z2 = zeta**2
    pu = _truncated(ue, z2)
    qu = _truncated(uo, z2) / zeta
    pv = _truncated(ve, z2)
    qv = _truncated(vo, z2) / zeta
    r = 1 / math.sqrt(math.pi)
    ai = r * y**-0.25 * (np.cos(ph) * pu + np.sin(ph) * qu)
    aip = r * y**0.25 * (np.sin(ph) * pv - np.cos(ph) * qv)
    return ai, aip


def _taylor(x0, y0, d0, dx, terms: int = TAYLOR_TERMS):
    """Value and derivative at x0 + dx of the Airy solution with data (y0, d0) at x0.

    Derivatives obey y^{(n+2)} = x0 y^{(n)} + n y^{(n-1)}; we track
    c_n = y^{(n)}(x0) dx^n / n!.
    """
    c_prev2 = np.zeros_like(y0)  # c_{-1}
    c0 = y0
    c1 = d0 * dx
    val = c0 + c1
    der = d0 + 0.0 * dx
    cs = [c0, c1]
    for n in range(terms - 2):
        cm1 = cs[n - 1] if n >= 1 else c_prev2
        c_next = (x0 * cs[n] * dx**2 + cm1 * dx**3) / ((n + 1) * (n + 2))
        cs.append(c_next)
        val = val + c_next
        safe_dx = np.where(dx == 0, 1.0, dx)
        der = der + np.where(dx == 0, 0.0, (n + 2) * c_next / safe_dx)
    return val, der


@dataclass(frozen=True)
class _Table:
    nodes: np.ndarray
    ai: np.ndarray
    aip: np.ndarray
    switchover: float


@lru_cache(maxsize=1)
def _table() -> _Table:
    nodes = np.arange(TABLE_LO, TABLE_HI + STEP / 2, STEP)
    ai = np.empty_like(nodes)
    aip = np.empty_like(nodes)
    i0 = int(round(-TABLE_LO / STEP))
    # negative side: outward from the series at 0
    y, d = _maclaurin(0.0)
    ai[i0], aip[i0] = y, d
    for i in range(i0 - 1, -1, -1):
        y, d = _taylor(nodes[i + 1], np.float64(y), np.float64(d), -STEP)
        ai[i], aip[i] = y, d
    # positive side: downward from the asymptotic values at the top
    y, d = (float(v[0]) for v in _asym_pos(np.array([TABLE_HI])))
    ai[-1], aip[-1] = y, d
    for i in range(len(nodes) - 2, i0, -1):
        y, d = _taylor(nodes[i + 1], np.float64(y), np.float64(d), -STEP)
        ai[i], aip[i] = y, d
    y, d = _taylor(nodes[i0 + 1], np.float64(y), np.float64(d), -STEP)
    switch = max(abs(y - ai[i0]), abs(d - aip[i0]))
    return _Table(nodes, ai, aip, float(switch))


def switchover_error() -> float:
    """Disagreement at 0 between the series and the continued asymptotic values."""
    return _table().switchover


def _airy_internal(x) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    ai = np.empty_like(x)
    aip = np.empty_like(x)
    hi = x > TABLE_HI
    lo = x < TABLE_LO
    mid = ~(hi | lo)
    if hi.any():
        xh = x[hi]
        big = xh > 110.0  # Ai underflows
        a, b = _asym_pos(np.where(big, TABLE_HI, xh))
        ai[hi] = np.where(big, 0.0, a)
        aip[hi] = np.where(big, 0.0, b)
    if lo.any():
        ai[lo], aip[lo] = _asym_neg(x[lo])
    if mid.any():
        tb = _table()
        xm = x[mid]
        idx = np.clip(np.rint((xm - TABLE_LO) / STEP).astype(int), 0, len(tb.nodes) - 1)
        x0 = tb.nodes[idx]
        ai[mid], aip[mid] = _taylor(x0, tb.ai[idx], tb.aip[idx], xm - x0)
    if scalar:
        return ai[0], aip[0]
    return ai, aip


def airy_fn(x):
    """(Ai(x), Ai'(x)) for |x| <= 40; accepts arrays."""
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > PUBLIC_RANGE) or np.any(~np.isfinite(xa)):
        raise AiryRangeError(f"airy_fn is supported on |x| <= {PUBLIC_RANGE}")
    return _airy_internal(xa)


def airy_ode_residual(x, h: float = 1e-3) -> np.ndarray:
    """|Ai''(x) - x Ai(x)| with Ai'' from a five-point difference of Ai'."""
    x = np.asarray(x, dtype=float)
    d = [_airy_internal(x + k * h)[1] for k in (-2, -1, 1, 2)]
    a, _ = _airy_internal(x)
    second = (d[0] - 8 * d[1] + 8 * d[2] - d[3]) / (12 * h)
    return np.abs(second - x * a)


# ---------------------------------------------------------------------------
# kernel


def airy_kernel(x, y):
    """K(x, y) = (Ai(x) Ai'(y) - Ai(y) Ai'(x)) / (x - y), with the diagonal limit."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    ax, apx = _airy_internal(x)
    ay, apy = _airy_internal(y)
    return _kernel_from_values(x, y, ax, apx, ay, apy)


def _kernel_from_values(x, y, ax, apx, ay, apy):
    d = x - y
    diag = d == 0
    safe = np.where(diag, 1.0, d)
    off = (ax * apy - ay * apx) / safe
    on = apx**2 - x * ax**2
    return np.where(diag, on, off)


def kernel_matrix(x: np.ndarray) -> np.ndarray:
    a, ap = _airy_internal(x)
    return _kernel_from_values(
        x[:, None], x[None, :], a[:, None], ap[:, None], a[None, :], ap[None, :]
    )


def airy_kernel_integral(x: float, y: float, upper: float = 30.0, panels: int = 120) -> float:
    """K(x, y) = int_0^inf Ai(x + a) Ai(y + a) da by composite Gauss-Legendre."""
    g, w = np.polynomial.legendre.leggauss(20)
    edges = np.linspace(0.0, upper, panels + 1)
    mid = (edges[1:] + edges[:-1]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    a = (mid[:, None] + half[:, None] * g[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    ax, _ = _airy_internal(x + a)
    ay, _ = _airy_internal(y + a)
    return float(np.sum(wt * ax * ay))


# ---------------------------------------------------------------------------
# Tracy-Widom F2


@lru_cache(maxsize=16)
def _gauss_legendre(m: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(m)


def _f2_single(s: float, m: int) -> float:
    xi, w = _gauss_legendre(m)
    ang = np.pi * (xi + 1) / 4
    x = s + np.tan(ang)
    jac = (np.pi / 4) / np.cos(ang) ** 2
    sw = np.sqrt(w * jac)
    K = kernel_matrix(x)
    A = np.eye(m) - sw[:, None] * K * sw[None, :]
    lu, piv = scipy.linalg.lu_factor(A)
    sign = (-1) ** int(np.sum(piv != np.arange(m)))
    return float(sign * np.prod(np.diag(lu)))


def tracy_widom_f2(s, m: int = 64, check: bool = False):
    """F2(s) = det(I - K_Airy) on L^2(s, inf) by Nystrom discretisation.

    Gauss-Legendre nodes on (-1, 1) are sent to (s, inf) by
    x = s + tan(pi (xi + 1) / 4).  With ``check`` the value is recomputed
    with 2m nodes and a :class:`ConvergenceError` raised if the two differ
    by more than 1e-8.
    """
    if m < 32:
        raise ValueError("quadrature order must be at least 32")
    sa = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(sa < -10):
        raise ValueError("tracy_widom_f2 needs s >= -10")
    vals = np.array([_f2_single(v, m) for v in sa])
    if check:
        fine = np.array([_f2_single(v, 2 * m) for v in sa])
        err = np.max(np.abs(fine - vals))
        if err > 1e-8:
            raise ConvergenceError(f"F2 changed by {err:.2e} under node doubling")
    vals = np.clip(vals, 0.0, 1.0)
    return vals[0] if np.ndim(s) == 0 else vals


def _composite(lo: float, hi: float, panels: int, order: int):
    g, w = _gauss_legendre(order)
    edges = np.linspace(lo, hi, panels + 1)
    mid = (edges[1:] + edges[:-1]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    return (mid[:, None] + half[:, None] * g).ravel(), (half[:, None] * w).ravel()


@dataclass(frozen=True)
class F2Moments:
    mean: float
    variance: float
    mean_error: float
    variance_error: float


def _moments_at(m: int, panels: int) -> tuple[float, float]:
    # E X = int_0^inf (1 - F) - int_-inf^0 F ; E X^2 = 2 int_0^inf x (1-F) + 2 int_-inf^0 |x| F
    xl, wl = _composite(-10.0, 0.0, panels, 16)
    xr, wr = _composite(0.0, 8.0, panels, 16)
    Fl = tracy_widom_f2(xl, m)
    Fr = tracy_widom_f2(xr, m)
    mean = np.sum(wr * (1 - Fr)) - np.sum(wl * Fl)
    second = 2 * np.sum(wr * xr * (1 - Fr)) + 2 * np.sum(wl * (-xl) * Fl)
    return float(mean), float(second - mean**2)


def tracy_widom_moments(m: int = 48, panels: int = 4) -> F2Moments:
    """Mean and variance of F2 from tail integrals, with a doubled-resolution estimate."""
    m1, v1 = _moments_at(m, panels)
    m2, v2 = _moments_at(2 * m, 2 * panels)
    return F2Moments(m2, v2, abs(m2 - m1), abs(v2 - v1))


# ---------------------------------------------------------------------------
# Laplace transforms of Airy correlation functions


@dataclass(frozen=True)
class MomentResult:
    value: float
    tail_bound: float


def airy_moment_lhs(s, lower: float = -40.0, upper: float = 12.0, panels: int = 104,
                    order: int = 20) -> MomentResult:
    """Laplace transform of the Airy point process correlation functions.

    k = 1: int e^{s x} K(x, x) dx.
    k = 2: E[sum_i e^{s1 a_i} sum_j e^{s2 a_j}], i.e. the double integral of
    e^{s1 x + s2 y} (K(x,x) K(y,y) - K(x,y)^2) plus the diagonal term
    int e^{(s1 + s2) x} K(x, x) dx.

    The region x < lower is handled with the leading density sqrt(|x|)/pi,
    whose Laplace transform is an incomplete gamma function; the size of
    that correction is reported as the tail bound.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s <= 0) or len(s) not in (1, 2):
        raise ValueError("need one or two positive s values")
    x, w = _composite(lower, upper, panels, order)
    a, ap = _airy_internal(x)
    kd = ap**2 - x * a**2

    def one(sv):
        body = np.sum(w * np.exp(sv * x) * kd)
        T = -lower
        tail = gammaincc(1.5, sv * T) * math.gamma(1.5) / (math.pi * sv**1.5)
        return body + tail, tail

    if len(s) == 1:
        v, tail = one(s[0])
        if tail > 1e-6:
            raise ConvergenceError("tail correction too large; lower the cutoff")
        return MomentResult(float(v), float(tail))
    s1, s2 = s
    L1, t1 = one(s1)
    L2, t2 = one(s2)
    D, t3 = one(s1 + s2)
    K = _kernel_from_values(x[:, None], x[None, :], a[:, None], ap[:, None], a[None, :], ap[None, :])
    e1 = w * np.exp(s1 * x)
    e2 = w * np.exp(s2 * x)
    cross = e1 @ (K**2) @ e2
    tail = t1 * abs(L2) + t2 * abs(L1) + t3
    if tail > 1e-4:
        raise ConvergenceError("tail correction too large; lower the cutoff")
    return MomentResult(float(L1 * L2 - cross + D), float(tail))


def airy_moment_closed_form(s: float) -> float:
    """(1 / (2 sqrt(pi))) s^{-3/2} exp(s^3 / 12)."""
    return math.exp(s**3 / 12) / (2 * math.sqrt(math.pi) * s**1.5)
