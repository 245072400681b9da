"""Contour-integral evaluation of Schur-measure observables and their limits.

Circle integrals use the trapezoid rule, which converges geometrically for
integrands analytic in an annulus around the circle.  Each evaluation
doubles the node count until two successive values agree, and each circle
carries a certificate listing the poles it must enclose or avoid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .airy import airy_moment_closed_form


class ContourError(ValueError):
    """A contour fails its pole-separation certificate."""


class NonConvergenceError(RuntimeError):
    """Node doubling did not settle the integral."""


@dataclass(frozen=True)
class CircleContour:
    center: complex
    radius: float
    nodes: int = 64

    def points(self, m: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Nodes z_k and the trapezoid factors (z_k - c)/m, so that
        (1/2 pi i) oint f dz ~= sum f(z_k) * factor_k."""
        m = self.nodes if m is None else m
        th = 2 * np.pi * np.arange(m) / m
        off = self.radius * np.exp(1j * th)
        return self.center + off, off / m

    def certify(self, inside: Sequence[complex] = (), outside: Sequence[complex] = (),
                rel_gap: float = 1e-6) -> "Certificate":
        tol = rel_gap * self.radius
        ins, outs, bad = [], [], []
        for p in inside:
            d = self.radius - abs(complex(p) - self.center)
            (ins if d > tol else bad).append((complex(p), d))
        for p in outside:
            d = abs(complex(p) - self.center) - self.radius
            (outs if d > tol else bad).append((complex(p), d))
        return Certificate(self, tuple(ins), tuple(outs), tuple(bad))


@dataclass(frozen=True)
class Certificate:
    contour: CircleContour
    inside: tuple
    outside: tuple
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations

    def require(self) -> None:
        if self.violations:
            p, d = self.violations[0]
            raise ContourError(
                f"circle r={self.contour.radius:.6g} misplaces pole {p:.6g} (signed gap {d:.3g})"
            )


@dataclass(frozen=True)
class IntegralResult:
    value: complex
    error: float
    nodes: int
    certificates: tuple = field(default=(), repr=False)


def _doubling(evaluate: Callable[[int], complex], m0: int, tol: float, m_max: int) -> IntegralResult:
    m = m0
    prev = evaluate(m)
    while True:
        m *= 2
        cur = evaluate(m)
        err = abs(cur - prev)
        if err <= tol * max(1.0, abs(cur)):
            return IntegralResult(complex(cur), float(err), m)
        if m >= m_max:
            raise NonConvergenceError(f"node doubling to {m} still changes the value by {err:.2e}")
        prev = cur


# ---------------------------------------------------------------------------
# Schur-measure observables


def _single_factor(z, x, y, q):
    """prod_j (q z - x_j)/(z - x_j) * (1 - y_j z)/(1 - q y_j z), vectorised in z."""
    out = np.ones_like(z)
    for xj in x:
        out = out * (q * z - xj) / (z - xj)
    for yj in y:
        out = out * (1 - yj * z) / (1 - q * yj * z)
    return out


def default_radii(x, y, qs) -> list[float]:
    """Radii enclosing {0, x} and avoiding every 1/(q_m y_j); for two circles also r_2 < q_1 r_1.

    Each radius sits geometrically midway inside its admissible interval.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    inner = float(np.max(np.abs(x))) if len(x) else 0.0
    ymax = float(np.max(np.abs(y))) if len(y) else 0.0
    outer = [1 / (q * ymax) if ymax > 0 else max(4 * inner, 1.0) for q in qs]
    if len(qs) == 1:
        return [math.sqrt(inner * outer[0]) if inner > 0 else outer[0] / 2]
    hi2 = min(qs[0] * outer[0], outer[1])
    if not inner < hi2:
        raise ContourError("no nested circles exist for these parameters")
    r2 = math.sqrt(inner * hi2) if inner > 0 else hi2 / 2
    lo1 = r2 / qs[0]
    r1 = math.sqrt(lo1 * outer[0])
    return [r1, r2]


def schur_qsum_contour(n: int, x, y, qs, contours: Sequence[CircleContour] | None = None,
                       tol: float = 1e-12, m_max: int = 1 << 13) -> IntegralResult:
    """E prod_m sum_{j in Z>=0 minus {lambda_i + N - i}} q_m^j as a k-fold contour integral, k <= 2.

    Variable z_m runs over a circle enclosing 0 and every x_i and avoiding
    every 1/(q_m y_j); for k = 2 the inner circle also avoids z_1/q_2 and
    q_1 z_1 (which holds when r_2 < q_1 r_1).
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    qs = [float(q) for q in np.atleast_1d(qs)]
    if len(x) != n or len(y) != n:
        raise ValueError("x and y must have length N")
    k = len(qs)
    if k not in (1, 2):
        raise ValueError("only k = 1 or 2 is supported")
    if any(not 0 < q < 1 for q in qs):
        raise ValueError("need 0 < q < 1")
    if k == 2 and abs(qs[0] - qs[1]) < 1e-12:
        raise ValueError("q values must be distinct")
    if contours is None:
        contours = [CircleContour(0j, r) for r in default_radii(x, y, qs)]
    if len(contours) != k:
        raise ValueError("one contour per q")
    certs = []
    for m, (c, q) in enumerate(zip(contours, qs)):
        cert = c.certify(inside=[0.0, *x], outside=[1 / (q * yj) for yj in y if yj != 0])
        cert.require()
        certs.append(cert)
    if k == 2:
        c1, c2 = contours
        if abs(c1.center) > 0 or abs(c2.center) > 0:
            raise ContourError("nested contours must be centred at 0")
        if not c2.radius < qs[0] * c1.radius:
            raise ContourError("nesting needs r_2 < q_1 r_1")
        if not c2.radius * 1 < c1.radius * qs[1] ** -1:
            raise ContourError("nesting needs r_2 < r_1 / q_2")

    def ev(m: int) -> complex:
        if k == 1:
            (c,), (q,) = contours, qs
            z, fac = c.points(m)
            f = _single_factor(z, x, y, q) / ((1 - q) * z)
            return complex(np.sum(f * fac))
        (ca, cb), (qa, qb) = contours, qs
        z1, f1 = ca.points(m)
        z2, f2 = cb.points(m)
        g1 = _single_factor(z1, x, y, qa) / ((1 - qa) * z1) * f1
        g2 = _single_factor(z2, x, y, qb) / ((1 - qb) * z2) * f2
        Z1 = z1[:, None]
        Z2 = z2[None, :]
        cross = (qa * Z1 - qb * Z2) / (Z1 - qb * Z2) * (Z1 - Z2) / (qa * Z1 - Z2)
        return complex(g1 @ cross @ g2)

    res = _doubling(ev, 32, tol, m_max)
    return IntegralResult(res.value, res.error, res.nodes, tuple(certs))


def qsum_residue_sum(x, y, q) -> complex:
    """E sum_i q^{lambda_i + N - i} as the residue sum at z = x_i."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    total = 0j
    for i in range(len(x)):
        c = 1.0 + 0j
        for j in range(len(x)):
            if j != i:
                c *= (q * x[i] - x[j]) / (x[i] - x[j])
        total += c * np.prod((1 - x[i] * y) / (1 - q * x[i] * y))
    return complex(total)


def qsum_contour(x, y, q, contour: CircleContour | None = None, tol: float = 1e-12) -> IntegralResult:
    """E sum_i q^{lambda_i + N - i} by a circle around the x_i that excludes 0."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if contour is None:
        c = np.mean(x)
        r = float(np.max(np.abs(x - c))) * 1.5 + 1e-3
        contour = CircleContour(complex(c), r)
    cert = contour.certify(inside=list(x), outside=[0.0, *[1 / (q * yj) for yj in y if yj != 0]])
    cert.require()

    def ev(m):
        z, fac = contour.points(m)
        return complex(np.sum(_single_factor(z, x, y, q) / ((q - 1) * z) * fac))

    res = _doubling(ev, 32, tol, 1 << 14)
    return IntegralResult(res.value, res.error, res.nodes, (cert,))


# ---------------------------------------------------------------------------
# one-point scaling limit in the homogeneous case


def scaling_constants(u: float) -> tuple[float, float]:
    """alpha = (1 - sqrt u)/(1 + sqrt u) and sigma = u^{1/6} (1 - sqrt u)^{1/3}/(1 + sqrt u)."""
    if not 0 < u < 1:
        raise ValueError("need 0 < u < 1")
    r = math.sqrt(u)
    return (1 - r) / (1 + r), u ** (1 / 6) * (1 - r) ** (1 / 3) / (1 + r)


def oneq_limit_value(s: float, u: float) -> tuple[float, float]:
    """(limit value, alpha) with value (1/(2 sqrt pi)) (s sigma)^{-3/2} exp((s sigma)^3 / 12)."""
    if s <= 0:
        raise ValueError("need s > 0")
    alpha, sigma = scaling_constants(u)
    return airy_moment_closed_form(s * sigma), alpha


def critical_point(u: float) -> float:
    return -1 / math.sqrt(u)


def F0(z, u):
    return (1 - u) * z / ((1 - z) * (1 - u * z))


def F0_prime(z, u):
    return (1 - u) * (1 - u * z**2) / ((1 - z) * (1 - u * z)) ** 2


def F1(z, u):
    return -(z**2) / (1 - z) ** 2 + (u * z) ** 2 / (1 - u * z) ** 2


def F2(z, u):
    return z**3 / (1 - z) ** 3 - (u * z) ** 3 / (1 - u * z) ** 3


def oneq_contour_value(n: int, q: float, u: float, shift: float = 0.0,
                       tol: float = 1e-10, m_max: int = 1 << 16) -> IntegralResult:
    """q^{-shift} E sum_{p} q^{p} at x = 1, y = u, by the circle |z| = 1/sqrt(u).

    The integrand is (1/(1-q)) ((q z - 1)/(z - 1) (1 - u z)/(1 - q u z))^N / z;
    the circle passes through the critical point -1/sqrt(u), encloses 0 and 1
    and excludes 1/(q u).  The factor q^{-shift} is folded into the
    exponent to avoid overflow.
    """
    if not 0 < q < 1:
        raise ValueError("need 0 < q < 1")
    r = 1 / math.sqrt(u)
    c = CircleContour(0j, r)
    cert = c.certify(inside=[0.0, 1.0], outside=[1 / (q * u)])
    cert.require()
    lq = math.log(q)

    def ev(m):
        z, fac = c.points(m)
        lg = np.log((q * z - 1) / (z - 1)) + np.log((1 - u * z) / (1 - q * u * z))
        return complex(np.sum(np.exp(n * lg - shift * lq) / ((1 - q) * z) * fac))

    res = _doubling(ev, 256, tol, m_max)
    return IntegralResult(res.value, res.error, res.nodes, (cert,))


def oneq_scaling_sequence(s: float, u: float, ns: Sequence[int]) -> list[tuple[int, float, float]]:
    """(N, scaled value, error estimate) with q = 1 - s N^{-1/3}, scaled by q^{-alpha N}."""
    alpha, _ = scaling_constants(u)
    out = []
    for n in ns:
        q = 1 - s * n ** (-1 / 3)
        if not 0 < q < 1:
            raise ValueError(f"q = {q} outside (0, 1) at N = {n}")
        res = oneq_contour_value(n, q, u, shift=alpha * n)
        out.append((int(n), float(res.value.real), res.error))
    return out


# ---------------------------------------------------------------------------
# Airy Laplace transforms on vertical lines


@dataclass(frozen=True)
class VerticalContour:
    v: float
    half_height: float
    nodes: int

    def points(self):
        g, w = np.polynomial.legendre.leggauss(20)
        panels = max(1, self.nodes // 20)
        edges = np.linspace(-self.half_height, self.half_height, panels + 1)
        mid = (edges[1:] + edges[:-1]) / 2
        half = (edges[1:] - edges[:-1]) / 2
        t = (mid[:, None] + half[:, None] * g).ravel()
        wt = (half[:, None] * w).ravel()
        return self.v + 1j * t, wt


def airy_laplace_rhs(s, v=None, T: float | None = None, M: int = 400) -> IntegralResult:
    """Vertical-line evaluation of

        e^{sum s_i^3/12} / (2 pi i)^k  int ... int  prod_m e^{s_m z_m^2} dz_m / s_m
            * prod_{i<j} (z_j - s_j/2 - z_i + s_i/2)(z_j + s_j/2 - z_i - s_i/2)
                         / ((z_j + s_j/2 - z_i + s_i/2)(z_j - s_j/2 - z_i - s_i/2))

    for k = 1 or 2, on Re z_j = v_j with v_j - s_j/2 > v_i + s_i/2 (i < j).
    """
    s = [float(a) for a in np.atleast_1d(s)]
    k = len(s)
    if k not in (1, 2) or any(a <= 0 for a in s):
        raise ValueError("need one or two positive s values")
    v = [0.0] * k if v is None else [float(a) for a in np.atleast_1d(v)]
    if len(v) != k:
        raise ValueError("one v per s")
    if k == 2 and not v[1] - s[1] / 2 > v[0] + s[0] / 2:
        raise ContourError("vertical lines violate v_2 - s_2/2 > v_1 + s_1/2")
    # Gaussian decay: |e^{s z^2}| = e^{s (v^2 - t^2)}
    if T is None:
        T = max(math.sqrt(34 / a) + abs(b) for a, b in zip(s, v))
    for a, b in zip(s, v):
        if math.exp(-a * (T**2 - 2 * b * b) if b else -a * T**2) > 1e-14:
            raise ContourError("truncation height too small for the decay certificate")
    pref = math.exp(sum(a**3 for a in s) / 12)
    lines = [VerticalContour(b, T, M) for b in v]
    if k == 1:
        z, w = lines[0].points()
        val = np.sum(np.exp(s[0] * z**2) * w) / (2 * np.pi * s[0])
        return IntegralResult(complex(pref * val), abs(pref * val - airy_moment_closed_form(s[0])), M)
    (za, wa), (zb, wb) = (ln.points() for ln in lines)
    ga = np.exp(s[0] * za**2) * wa / s[0]
    gb = np.exp(s[1] * zb**2) * wb / s[1]
    Z1 = za[:, None]
    Z2 = zb[None, :]
    h1, h2 = s[0] / 2, s[1] / 2
    cross = ((Z2 - h2 - Z1 + h1) * (Z2 + h2 - Z1 - h1)) / ((Z2 + h2 - Z1 + h1) * (Z2 - h2 - Z1 - h1))
    # dz = i dt on each line; (i)^2 / (2 pi i)^2 = 1 / (2 pi)^2
    val = ga @ cross @ gb / (2 * np.pi) ** 2
    coarse_lines = [VerticalContour(b, T, M // 2) for b in v]
    (ca, cwa), (cb, cwb) = (ln.points() for ln in coarse_lines)
    cg = np.exp(s[0] * ca**2) * cwa / s[0]
    cgb = np.exp(s[1] * cb**2) * cwb / s[1]
    C1 = ca[:, None]
    C2 = cb[None, :]
    ccross = ((C2 - h2 - C1 + h1) * (C2 + h2 - C1 - h1)) / ((C2 + h2 - C1 + h1) * (C2 - h2 - C1 - h1))
    coarse = cg @ ccross @ cgb / (2 * np.pi) ** 2
    return IntegralResult(complex(pref * val), float(pref * abs(val - coarse)), M)
