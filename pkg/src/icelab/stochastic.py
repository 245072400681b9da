"""Sequential sampling of the stochastic six-vertex model.

Step boundary: a path enters through every bottom edge, nothing through the
left side, and the top and right exits are free.  Rows are swept bottom to
top and each row left to right; a vertex with a single incoming path sends
it up with probability b1 (path from below) or right with probability b2
(path from the left).  Vertices with zero or two incoming paths are forced.

Random numbers come from :mod:`icelab.rng` with stream = sample index and
counter = vertex index ``j * N + i``, so every sample is reproducible on its
own and the batch does not depend on how samples are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numba
import numpy as np

from .core import BoundaryData, SixVertexConfig
from .rng import _u64, default_seed, draw_uniform, stream_key


class ProbabilityRangeError(ValueError):
    pass


@dataclass(frozen=True)
class StochasticParams:
    n: int
    u: float
    t: float
    seed: int = field(default_factory=default_seed)
    samples: int = 1000

    def __post_init__(self):
        if self.n < 1 or self.samples < 0:
            raise ValueError("need N >= 1 and samples >= 0")
        b1, b2 = self.b1, self.b2
        if not (0 < b1 < 1 and 0 < b2 < 1):
            raise ProbabilityRangeError(f"b1={b1}, b2={b2} must lie in (0, 1)")

    @property
    def b1(self) -> float:
        return (1 - self.u) / (1 - self.t * self.u)

    @property
    def b2(self) -> float:
        return self.t * (1 - self.u) / (1 - self.t * self.u)

    def fields(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.n
        return np.full((n, n), self.b1), np.full((n, n), self.b2)


@dataclass
class SampleBatch:
    """Column store of per-sample observables with RNG provenance."""

    columns: dict
    seed: int
    rng: str = "splitmix64 counter hash; stream = sample index, counter = vertex index"
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def __getitem__(self, key: str) -> np.ndarray:
        return self.columns[key]


@dataclass(frozen=True)
class HeightSample:
    h: int
    field: Optional[np.ndarray] = None


# ---------------------------------------------------------------------------
# kernels


@numba.njit(cache=True, parallel=True)
def _heights(b1, b2, seed, start, count):
    n = b1.shape[0]
    out = np.empty(count, dtype=np.int64)
    for s in numba.prange(count):
        key = stream_key(seed, np.uint64(start + s))
        occ = np.ones(n, dtype=np.int8)
        for j in range(n):
            carry = 0
            base = j * n
            for i in range(n):
                below = occ[i]
                if below == 1 and carry == 1:
                    continue
                if below == 0 and carry == 0:
                    continue
                r = draw_uniform(key, np.uint64(base + i))
                if below == 1:
                    if r >= b1[i, j]:
                        occ[i] = 0
                        carry = 1
                else:
                    if r >= b2[i, j]:
                        occ[i] = 1
                        carry = 0
        h = 0
        for i in range(n):
            h += occ[i]
        out[s] = h
    return out


@numba.njit(cache=True)
def _full_config(b1, b2, seed, sample, v, h):
    """Fill edge grids v (n, n+1) and h (n+1, n) for one sample."""
    n = b1.shape[0]
    key = stream_key(seed, np.uint64(sample))
    for i in range(n):
        v[i, 0] = 1
    for j in range(n):
        carry = 0
        h[0, j] = 0
        for i in range(n):
            below = v[i, j]
            up = below
            if below + carry == 1:
                r = draw_uniform(key, np.uint64(j * n + i))
                if below == 1:
                    if r >= b1[i, j]:
                        up = 0
                        carry = 1
                else:
                    if r >= b2[i, j]:
                        up = 1
                        carry = 0
            v[i, j + 1] = up
            h[i + 1, j] = carry


@numba.njit(cache=True, parallel=True)
def _config_codes(b1, b2, seed, start, count):
    """Integer code of each sampled configuration: the bits of v[:, 1:] then h[1:, :]."""
    n = b1.shape[0]
    out = np.empty(count, dtype=np.int64)
    for s in numba.prange(count):
        v = np.zeros((n, n + 1), dtype=np.int8)
        h = np.zeros((n + 1, n), dtype=np.int8)
        _full_config(b1, b2, seed, start + s, v, h)
        code = 0
        bit = 0
        for i in range(n):
            for j in range(1, n + 1):
                code |= np.int64(v[i, j]) << bit
                bit += 1
        for i in range(1, n + 1):
            for j in range(n):
                code |= np.int64(h[i, j]) << bit
                bit += 1
        out[s] = code
    return out


def config_code(cfg: SixVertexConfig) -> int:
    """Same encoding as the sampler uses, for comparison with enumeration."""
    n = cfg.width
    code, bit = 0, 0
    for i in range(n):
        for j in range(1, n + 1):
            code |= int(cfg.vertical[i, j]) << bit
            bit += 1
    for i in range(1, n + 1):
        for j in range(n):
            code |= int(cfg.horizontal[i, j]) << bit
            bit += 1
    return code


# ---------------------------------------------------------------------------
# public operations


def sample_heights(p: StochasticParams, start: int = 0) -> np.ndarray:
    b1, b2 = p.fields()
    return _heights(b1, b2, _u64(p.seed), start, p.samples)


def sample_configuration(p: StochasticParams, index: int = 0) -> tuple[SixVertexConfig, HeightSample]:
    """One full configuration (sample number ``index``) with its height field."""
    b1, b2 = p.fields()
    return _config_from_fields(b1, b2, p.seed, index)


def _config_from_fields(b1, b2, seed, index):
    n = b1.shape[0]
    v = np.zeros((n, n + 1), dtype=np.int8)
    h = np.zeros((n + 1, n), dtype=np.int8)
    _full_config(b1, b2, _u64(seed), index, v, h)
    cfg = SixVertexConfig(n, n, v, h, BoundaryData.step_free(n))
    return cfg, HeightSample(cfg.top_exits(), cfg.height_function())


def sample_codes(p: StochasticParams, start: int = 0) -> np.ndarray:
    b1, b2 = p.fields()
    return _config_codes(b1, b2, _u64(p.seed), start, p.samples)


def _inhomogeneous_fields(x, y, t):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    u = np.outer(x, y)
    b1 = (1 - u) / (1 - t * u)
    b2 = t * (1 - u) / (1 - t * u)
    # b = 1 exactly (u = 0) is allowed: the path is then forced straight up
    if np.any(b1 <= 0) or np.any(b1 > 1) or np.any(b2 <= 0) or np.any(b2 >= 1):
        raise ProbabilityRangeError("site probabilities must lie in (0, 1)")
    return b1, b2


def inhomogeneous_sample(n: int, x, y, t: float, seed: int | None = None,
                         samples: int = 1, start: int = 0) -> np.ndarray:
    """H_N for ``samples`` draws with site-dependent u = x_i y_j."""
    if len(x) != n or len(y) != n:
        raise ValueError("x and y must have length N")
    b1, b2 = _inhomogeneous_fields(x, y, t)
    seed = default_seed() if seed is None else seed
    return _heights(b1, b2, _u64(seed), start, samples)


def inhomogeneous_configuration(n, x, y, t, seed=None, index=0):
    b1, b2 = _inhomogeneous_fields(x, y, t)
    return _config_from_fields(b1, b2, default_seed() if seed is None else seed, index)


# ---------------------------------------------------------------------------
# fluctuation constants and statistics


def scale_constant_height_form(u: float) -> float:
    """(1 - sqrt u)^{4/3} / (u^{1/3} (u^{-1/2} - u^{1/2}))."""
    r = math.sqrt(u)
    return (1 - r) ** (4 / 3) / (u ** (1 / 3) * (1 / r - r))


def scale_constant_sigma_form(u: float) -> float:
    """u^{1/6} (1 - sqrt u)^{1/3} / (1 + sqrt u)."""
    r = math.sqrt(u)
    return u ** (1 / 6) * (1 - r) ** (1 / 3) / (1 + r)


def sigma_consistency(us) -> float:
    """Largest relative gap between the two scale-constant forms over ``us``."""
    return max(
        abs(scale_constant_height_form(u) - scale_constant_sigma_form(u)) / scale_constant_sigma_form(u)
        for u in us
    )


def centering(u: float) -> float:
    r = math.sqrt(u)
    return (1 - r) / (1 + r)


def standardize(h: np.ndarray, n: int, u: float) -> np.ndarray:
    return (np.asarray(h, dtype=float) - centering(u) * n) / (n ** (1 / 3) * scale_constant_height_form(u))


def limit_cdf(x) -> np.ndarray:
    """s -> 1 - F2(-s), the law of minus a GUE Tracy-Widom variable."""
    from .airy import tracy_widom_f2

    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    lo = x > 10  # F2(-s) below 1e-100 there
    hi = x < -8  # 1 - F2 below 1e-20 there
    out[lo] = 1.0
    out[hi] = 0.0
    mid = ~(lo | hi)
    if mid.any():
        out[mid] = 1 - tracy_widom_f2(-x[mid])
    return out


def ks_distance(samples: np.ndarray, cdf) -> float:
    """Kolmogorov-Smirnov distance of an empirical sample (ties allowed) from a CDF."""
    xs = np.sort(np.asarray(samples, dtype=float))
    n = len(xs)
    vals, counts = np.unique(xs, return_counts=True)
    upper = np.cumsum(counts) / n
    lower = upper - counts / n
    F = cdf(vals)
    return float(max(np.max(np.abs(upper - F)), np.max(np.abs(F - lower))))


CDF_GRID = np.linspace(-4.0, 6.0, 41)


def height_statistics(p: StochasticParams) -> SampleBatch:
    """Sample H_N, standardize, and summarise against the Tracy-Widom limit."""
    h = sample_heights(p)
    z = standardize(h, p.n, p.u)
    emp = np.searchsorted(np.sort(z), CDF_GRID, side="right") / max(len(z), 1)
    meta = {
        "n": p.n,
        "u": p.u,
        "t": p.t,
        "samples": p.samples,
        "alpha": centering(p.u),
        "scale": scale_constant_height_form(p.u),
        "mean": float(z.mean()) if len(z) else float("nan"),
        "var": float(z.var()) if len(z) else float("nan"),
        "ks_vs_F2": ks_distance(z, limit_cdf) if len(z) else float("nan"),
        "cdf_grid": CDF_GRID.tolist(),
        "cdf_empirical": emp.tolist(),
    }
    return SampleBatch({"sample_id": np.arange(len(h)), "H_N": h, "standardized": z}, p.seed, meta=meta)
