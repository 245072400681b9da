"""Partitions, Schur polynomials and truncated Schur-measure expectations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Callable, Iterator, Sequence

import numpy as np

from .determinants import MIN_GAP, CoincidentParameterError, _min_gap


class DivergenceError(ValueError):
    """The Schur measure series does not converge (max |x_i y_j| >= 1)."""


@dataclass(frozen=True, order=True)
class Partition:
    parts: tuple

    def __init__(self, parts: Sequence[int] = ()):
        p = [int(v) for v in parts]
        if any(v < 0 for v in p):
            raise ValueError("partition parts must be nonnegative")
        if any(p[i] < p[i + 1] for i in range(len(p) - 1)):
            raise ValueError(f"parts {p} are not weakly decreasing")
        while p and p[-1] == 0:
            p.pop()
        object.__setattr__(self, "parts", tuple(p))

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i] if i < len(self.parts) else 0

    def length(self) -> int:
        return len(self.parts)

    def size(self) -> int:
        return sum(self.parts)

    def padded(self, n: int) -> tuple:
        if len(self.parts) > n:
            raise ValueError(f"{self} has more than {n} parts")
        return self.parts + (0,) * (n - len(self.parts))

    def shifted(self, n: int) -> tuple:
        """The strictly decreasing sequence lambda_i + n - i, i = 1..n."""
        return tuple(p + n - 1 - i for i, p in enumerate(self.padded(n)))


def partitions_in_box(n: int, max_part: int) -> Iterator[Partition]:
    """All partitions with at most n parts, each at most max_part."""
    for combo in combinations(range(max_part + n), n):
        a = combo[::-1]
        yield Partition([a[i] - (n - 1 - i) for i in range(n)])


def shifted_array(n: int, max_part: int) -> np.ndarray:
    """Rows are lambda_i + n - i for every partition in the n x max_part box."""
    combos = np.array(list(combinations(range(max_part + n), n)), dtype=np.int64)
    return combos[:, ::-1].copy()


# ---------------------------------------------------------------------------
# Schur polynomials


def _vandermonde(x: np.ndarray) -> complex:
    out = 1.0 + 0j
    for i, j in combinations(range(len(x)), 2):
        out *= x[i] - x[j]
    return out


def schur_det(lam: Partition, x) -> complex:
    """Bialternant det[x_i^{lambda_j + N - j}] / prod_{i<j}(x_i - x_j)."""
    x = np.asarray(x, dtype=complex)
    n = len(x)
    if len(lam) > n:
        return 0j
    if _min_gap(x) < MIN_GAP:
        raise CoincidentParameterError("determinant route needs distinct variables")
    a = np.array(lam.shifted(n))
    return complex(np.linalg.det(x[:, None] ** a[None, :]) / _vandermonde(x))


def schur_det_batch(a: np.ndarray, x) -> np.ndarray:
    """Schur values for many shifted sequences at once (rows of ``a``)."""
    x = np.asarray(x, dtype=complex)
    if _min_gap(x) < MIN_GAP:
        raise CoincidentParameterError("determinant route needs distinct variables")
    mats = x[None, :, None] ** a[:, None, :]
    return np.linalg.det(mats) / _vandermonde(x)


def _interlacing(lam: tuple) -> Iterator[tuple]:
    """Partitions mu with lam_{i+1} <= mu_i <= lam_i, one part fewer than lam."""
    n = len(lam)
    ranges = [range(lam[i + 1], lam[i] + 1) for i in range(n - 1)]

    def rec(i, acc):
        if i == n - 1:
            yield tuple(acc)
            return
        for v in ranges[i]:
            acc.append(v)
            yield from rec(i + 1, acc)
            acc.pop()

    yield from rec(0, [])


class TableauSchur:
    """Schur polynomials as sums over semistandard tableaux.

    Uses the branching rule s_lambda(x_1..x_n) =
    sum_{mu interlacing lambda} s_mu(x_1..x_{n-1}) x_n^{|lambda|-|mu|},
    which is the tableau sum organised by the positions of the entry n.
    Works at coincident variables; results are cached per instance.
    """

    def __init__(self, x):
        self.x = tuple(complex(v) for v in x)

    def __call__(self, lam: Partition) -> complex:
        n = len(self.x)
        if len(lam) > n:
            return 0j
        return self._s(lam.padded(n))

    @lru_cache(maxsize=None)
    def _s(self, lam: tuple) -> complex:
        n = len(lam)
        if n == 0:
            return 1.0 + 0j
        if n == 1:
            return self.x[0] ** lam[0]
        xn = self.x[n - 1]
        size = sum(lam)
        total = 0j
        for mu in _interlacing(lam):
            total += self._s(mu) * xn ** (size - sum(mu))
        return total


def schur_poly(lam: Partition, x, route: str = "auto") -> complex:
    """s_lambda(x); ``route`` is 'det', 'tableau', or 'auto' (det when x distinct)."""
    if not isinstance(lam, Partition):
        lam = Partition(lam)
    x = np.asarray(x, dtype=complex)
    if len(lam) > len(x):
        return 0j
    if route == "auto":
        route = "det" if _min_gap(x) >= 1e-3 else "tableau"
    if route == "det":
        return schur_det(lam, x)
    if route == "tableau":
        return TableauSchur(x)(lam)
    raise ValueError(f"unknown route {route!r}")


def schur_at_ones(lam: Partition, n: int) -> float:
    """s_lambda(1^n) = prod_{i<j} (lambda_i - lambda_j + j - i) / (j - i)."""
    if len(lam) > n:
        return 0.0
    p = lam.padded(n)
    out = 1.0
    for i, j in combinations(range(n), 2):
        out *= (p[i] - p[j] + j - i) / (j - i)
    return out


# ---------------------------------------------------------------------------
# Schur measure


def default_cutoff(x, y, tol: float = 1e-14) -> int:
    """Smallest L with r^L < tol (1 - r), r = max|x_i y_j|, plus a safety margin."""
    r = float(np.max(np.abs(np.outer(x, y))))
    if r >= 1:
        raise DivergenceError(f"max |x_i y_j| = {r} >= 1")
    if r == 0:
        return 1
    L = math.ceil(math.log(tol * (1 - r)) / math.log(r))
    return max(1, L + 10)


def cauchy_product(x, y) -> complex:
    """prod (1 - x_i y_j)^{-1}, the Schur-measure normalisation."""
    return complex(1.0 / np.prod(1 - np.outer(x, y)))


def _schur_values(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    n = len(v)
    if _min_gap(v) >= 1e-3:
        return schur_det_batch(a, v)
    ts = TableauSchur(v)
    lam = a - (n - 1 - np.arange(n))[None, :]
    return np.array([ts._s(tuple(int(p) for p in row)) for row in lam])


def schur_weights(n: int, x, y, cutoff: int | None = None):
    """Truncated Schur measure: shifted sequences, probabilities, missing mass."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if len(x) != n or len(y) != n:
        raise ValueError("x and y must have length N")
    r = float(np.max(np.abs(np.outer(x, y))))
    if r >= 1:
        raise DivergenceError(f"max |x_i y_j| = {r} >= 1")
    L = default_cutoff(x, y) if cutoff is None else cutoff
    a = shifted_array(n, L)
    p = _schur_values(a, x) * _schur_values(a, y) / cauchy_product(x, y)
    missing = abs(1 - p.sum())
    return a, p, missing


def schur_measure_expect(n: int, x, y, f: Callable, cutoff: int | None = None,
                         shifted: bool = False) -> tuple[complex, float]:
    """Sum over lambda_1 <= L of f(lambda) P(lambda).

    ``f`` receives a tuple of parts (or of shifted parts lambda_i + N - i when
    ``shifted``).  Returns ``(value, tail_bound)`` where ``tail_bound`` is the
    probability mass outside the box (exact, since the normaliser is known)
    scaled by the largest |f| seen.
    """
    a, p, missing = schur_weights(n, x, y, cutoff)
    delta = n - 1 - np.arange(n)
    fmax = 0.0
    total = 0j
    for row, pr in zip(a, p):
        key = tuple(int(v) for v in row) if shifted else tuple(int(v) for v in row - delta)
        fv = f(key)
        fmax = max(fmax, abs(fv))
        total += fv * pr
    return complex(total), float(missing * max(fmax, 1.0))


def laplace_observable_bruteforce(n: int, x, y, qs, cutoff: int | None = None) -> complex:
    """E prod_m sum_{j in Z>=0 minus {lambda_i + N - i}} q_m^j by truncated summation.

    The point sum is evaluated in closed form as 1/(1-q) minus the finitely
    many removed terms.
    """
    qs = np.atleast_1d(np.asarray(qs, dtype=float))
    if np.any((qs <= 0) | (qs >= 1)):
        raise ValueError("need 0 < q < 1")
    a, p, _ = schur_weights(n, x, y, cutoff)
    vals = np.ones(len(a), dtype=complex)
    for q in qs:
        vals *= 1.0 / (1 - q) - np.sum(q ** a.astype(float), axis=1)
    return complex(np.sum(vals * p))


def qsum_bruteforce(n: int, x, y, qs, cutoff: int | None = None) -> complex:
    """E prod_m sum_i q_m^{lambda_i + N - i} (the un-complemented observable)."""
    qs = np.atleast_1d(np.asarray(qs, dtype=float))
    a, p, _ = schur_weights(n, x, y, cutoff)
    vals = np.ones(len(a), dtype=complex)
    for q in qs:
        vals *= np.sum(q ** a.astype(float), axis=1)
    return complex(np.sum(vals * p))


# ---------------------------------------------------------------------------
# difference operator and point configurations


def dq_apply(q: complex, f: Callable, x) -> complex:
    """(D_q f)(x) = sum_i prod_{j != i} (q x_i - x_j)/(x_i - x_j) f(.., q x_i, ..)."""
    x = np.asarray(x, dtype=complex)
    if _min_gap(x) < MIN_GAP:
        raise CoincidentParameterError("D_q needs distinct variables")
    total = 0j
    for i in range(len(x)):
        coef = 1.0 + 0j
        for j in range(len(x)):
            if j != i:
                coef *= (q * x[i] - x[j]) / (x[i] - x[j])
        xs = x.copy()
        xs[i] *= q
        total += coef * f(xs)
    return complex(total)


def dq_eigenvalue(lam: Partition, n: int, q: complex) -> complex:
    return sum(q**a for a in lam.shifted(n))


@dataclass(frozen=True)
class PointConfiguration:
    points: tuple
    n: int

    @property
    def smallest(self) -> int:
        return self.points[0]


def point_config(lam: Partition, n: int, count: int | None = None) -> PointConfiguration:
    """First ``count`` points of Z>=0 minus {lambda_i + N - i}.

    Defaults to every point up to lambda_1 + N plus one more.
    """
    if len(lam) > n:
        raise ValueError(f"length of {lam} exceeds N={n}")
    taken = set(lam.shifted(n))
    if count is None:
        count = (lam[0] + n + 1) - n + 1
    pts = []
    j = 0
    while len(pts) < count:
        if j not in taken:
            pts.append(j)
        j += 1
    return PointConfiguration(tuple(pts), n)


def partition_from_points(pc: PointConfiguration) -> Partition:
    """Invert :func:`point_config` (needs every point below max(shifted) + 1)."""
    n = pc.n
    pts = set(pc.points)
    top = max(pc.points)
    occupied = sorted((j for j in range(top) if j not in pts), reverse=True)
    if len(occupied) != n:
        raise ValueError("point list too short to reconstruct the partition")
    return Partition([a - (n - 1 - i) for i, a in enumerate(occupied)])
