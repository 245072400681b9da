"""GUE sampling, corners process and the GUE edge comparison with F2."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .airy import tracy_widom_f2
from .rng import CounterRNG, default_seed
from .stochastic import ks_distance


class EigenError(RuntimeError):
    pass


@dataclass(frozen=True)
class HermitianMatrix:
    """Hermitian matrix stored by its upper triangle (row-major, diagonal included)."""

    k: int
    upper: np.ndarray

    @classmethod
    def from_dense(cls, a: np.ndarray) -> "HermitianMatrix":
        a = np.asarray(a, dtype=complex)
        k = a.shape[0]
        iu = np.triu_indices(k)
        up = a[iu].copy()
        up[iu[0] == iu[1]] = up[iu[0] == iu[1]].real
        return cls(k, up)

    def dense(self) -> np.ndarray:
        a = np.zeros((self.k, self.k), dtype=complex)
        iu = np.triu_indices(self.k)
        a[iu] = self.upper
        a = a + np.triu(a, 1).conj().T
        return a

    def corner(self, j: int) -> np.ndarray:
        return self.dense()[:j, :j]


def _gue_dense(k: int, rng: CounterRNG) -> np.ndarray:
    z = rng.normal(2 * k * k).reshape(2, k, k)
    x = z[0] + 1j * z[1]
    return (x + x.conj().T) / 2


def sample_gue(k: int, seed: int | None = None, stream: int = 0) -> HermitianMatrix:
    """A = (X + X*)/2 with X having i.i.d. N(0,1) + i N(0,1) entries."""
    if k < 1:
        raise ValueError("k must be positive")
    rng = CounterRNG(default_seed() if seed is None else seed, stream)
    return HermitianMatrix.from_dense(_gue_dense(k, rng))


@dataclass(frozen=True)
class CornersSample:
    """levels[j-1] holds the ascending eigenvalues of the j x j corner."""

    levels: tuple

    @property
    def k(self) -> int:
        return len(self.levels)

    def interlaced(self, tol: float = 1e-12) -> bool:
        for j in range(1, self.k):
            lo, hi = self.levels[j], self.levels[j - 1]
            if np.any(lo[:-1] > hi + tol) or np.any(hi > lo[1:] + tol):
                return False
        return True

    def diagonal(self) -> np.ndarray:
        """m_jj recovered as trace differences of consecutive corners."""
        s = np.array([lv.sum() for lv in self.levels])
        return np.diff(np.concatenate([[0.0], s]))


def corners_process(m: HermitianMatrix, k: int) -> CornersSample:
    """Eigenvalues of the leading j x j corners, j = 1..k (LAPACK Hermitian solver)."""
    if not 1 <= k <= m.k:
        raise ValueError("need 1 <= k <= dim")
    a = m.dense()
    levels = []
    for j in range(1, k + 1):
        try:
            ev = np.linalg.eigvalsh(a[:j, :j])
        except np.linalg.LinAlgError as e:  # pragma: no cover - LAPACK failure
            raise EigenError(str(e)) from e
        levels.append(ev)
        if abs(ev.sum() - np.trace(a[:j, :j]).real) > 1e-10 * max(1.0, np.abs(ev).max()):
            raise EigenError("trace identity fails for a corner")
    return CornersSample(tuple(levels))


def gue_corners_samples(k: int, samples: int, seed: int | None = None) -> np.ndarray:
    """Array (samples, k, k); entry [s, j, i] is lambda_{i+1}^{j+1} (NaN above the diagonal)."""
    seed = default_seed() if seed is None else seed
    out = np.full((samples, k, k), np.nan)
    for s in range(samples):
        cs = corners_process(sample_gue(k, seed, s), k)
        for j, lv in enumerate(cs.levels):
            out[s, j, : j + 1] = lv
    return out


@dataclass(frozen=True)
class EdgeReport:
    n: int
    samples: int
    mean: float
    var: float
    ks: float
    min_gap: float
    rescaled: np.ndarray


def gue_edge_check(n: int, samples: int, seed: int | None = None) -> EdgeReport:
    """Rescaled top eigenvalue (lambda_max - 2 sqrt N) N^{1/6} against F2."""
    if n < 2:
        raise ValueError("need N >= 2")
    seed = default_seed() if seed is None else seed
    top = np.empty(samples)
    gaps = np.empty(samples)
    for s in range(samples):
        a = _gue_dense(n, CounterRNG(seed, s))
        ev = scipy.linalg.eigvalsh(a, subset_by_index=[n - 2, n - 1], check_finite=False)
        top[s] = ev[1]
        gaps[s] = ev[1] - ev[0]
    z = (top - 2 * math.sqrt(n)) * n ** (1 / 6)

    def cdf(v):
        v = np.atleast_1d(v)
        out = np.ones_like(v)
        out[v < -10] = 0.0
        mid = (v >= -10) & (v <= 8)
        out[mid] = tracy_widom_f2(v[mid])
        return out

    return EdgeReport(n, samples, float(z.mean()), float(z.var()), ks_distance(z, cdf), float(gaps.min()), z)
