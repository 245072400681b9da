"""Brute-force enumeration of six-vertex configurations on small rectangles.

Rows are processed bottom to top with the vertical-edge occupancy between
rows as transfer state (a bitmask, bit ``i`` = column ``i``).  Within a row
the horizontal occupancy is carried left to right, which leaves at most two
choices per vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import (
    BoundaryData,
    ConfigurationError,
    SixVertexConfig,
    SpectralField,
    VertexType,
    Weights,
    as_field,
)

MAX_SITES = 36

A1, A2, B1, B2, C1, C2 = (int(v) for v in VertexType)


class EnumerationLimitError(ValueError):
    pass


@dataclass
class EnumerationResult:
    count: int
    partition_function: complex
    configs: Optional[List[Tuple[np.ndarray, complex]]] = None
    observables: Dict[str, complex] = field(default_factory=dict)
    # top-exit mask -> (summed weight, configuration count)
    by_top_mask: Dict[int, Tuple[complex, int]] = field(default_factory=dict)

    def probabilities(self) -> np.ndarray:
        if self.configs is None:
            raise ValueError("enumerate with keep_configs=True to get per-config data")
        w = np.array([c[1] for c in self.configs])
        return w / self.partition_function


def _row_transitions(bottom: int, left: int, width: int):
    """All ways to fill one row: yields (top_mask, right_bit, vertex_types)."""
    out = []

    def rec(i, carry, top, types):
        if i == width:
            out.append((top, carry, tuple(types)))
            return
        b = (bottom >> i) & 1
        if b == 0 and carry == 0:
            types.append(A1)
            rec(i + 1, 0, top, types)
            types.pop()
        elif b == 1 and carry == 1:
            types.append(A2)
            rec(i + 1, 1, top | (1 << i), types)
            types.pop()
        elif b == 1:
            types.append(B1)
            rec(i + 1, 0, top | (1 << i), types)
            types[-1] = C1
            rec(i + 1, 1, top, types)
            types.pop()
        else:
            types.append(B2)
            rec(i + 1, 1, top, types)
            types[-1] = C2
            rec(i + 1, 0, top | (1 << i), types)
            types.pop()

    rec(0, left, 0, [])
    return out


def _mask(bits: Sequence[int]) -> int:
    return sum(int(b) << i for i, b in enumerate(bits))


def enumerate_configs(
    width: int,
    height: int,
    boundary: BoundaryData,
    weights: Weights,
    keep_configs: bool = False,
) -> EnumerationResult:
    """Visit every configuration compatible with ``boundary`` exactly once.

    Returns the partition function, the configuration count, and the weight
    split by top-exit mask.  With ``keep_configs`` every configuration is
    returned as a (vertex-type array, weight) pair.
    """
    if width * height > MAX_SITES:
        raise EnumerationLimitError(
            f"{width}x{height} exceeds the {MAX_SITES}-vertex enumeration limit"
        )
    if boundary.width != width or boundary.height != height:
        raise ConfigurationError("boundary data does not match the domain size")
    W = as_field(weights).array(width, height)
    cache: dict = {}

    def row(j, bottom):
        key = (j, bottom)
        if key not in cache:
            res = []
            for top, right, types in _row_transitions(bottom, boundary.left_in[j], width):
                if boundary.right_out is not None and right != boundary.right_out[j]:
                    continue
                wt = complex(np.prod([W[i, j, types[i]] for i in range(width)]))
                res.append((top, wt, types))
            cache[key] = res
        return cache[key]

    start = _mask(boundary.bottom_in)
    if keep_configs:
        partial = [(start, 1.0 + 0j, [])]
        for j in range(height):
            nxt = []
            for mask, wt, rows in partial:
                for top, rw, types in row(j, mask):
                    nxt.append((top, wt * rw, rows + [types]))
            partial = nxt
        configs = []
        by_top: Dict[int, Tuple[complex, int]] = {}
        for mask, wt, rows in partial:
            if boundary.top_out is not None and mask != _mask(boundary.top_out):
                continue
            configs.append((np.array(rows, dtype=np.int64).T, wt))
            z, c = by_top.get(mask, (0j, 0))
            by_top[mask] = (z + wt, c + 1)
    else:
        # mask -> (weight, count)
        states: Dict[int, Tuple[complex, int]] = {start: (1.0 + 0j, 1)}
        for j in range(height):
            nxt: Dict[int, Tuple[complex, int]] = {}
            for mask, (wt, cnt) in states.items():
                for top, rw, _ in row(j, mask):
                    z, c = nxt.get(top, (0j, 0))
                    nxt[top] = (z + wt * rw, c + cnt)
            states = nxt
        if boundary.top_out is not None:
            target = _mask(boundary.top_out)
            by_top = {target: states[target]} if target in states else {}
        else:
            by_top = states
        configs = None
    Z = sum((v[0] for v in by_top.values()), 0j)
    count = sum(v[1] for v in by_top.values())
    return EnumerationResult(count, Z, configs, {}, dict(by_top))


def enumerate_config_objects(width, height, boundary, weights):
    """Generator of (SixVertexConfig, weight) pairs; meant for tiny domains."""
    res = enumerate_configs(width, height, boundary, weights, keep_configs=True)
    for types, wt in res.configs:
        yield SixVertexConfig.from_types(types), wt


def _check_n(n: int, limit: int = 5):
    if n < 1 or n > limit:
        raise EnumerationLimitError(f"N={n} outside the supported range 1..{limit}")


def dwbc_partition(n: int, x, y, t) -> complex:
    """Inhomogeneous DWBC partition function by enumeration (u_ij = x_i y_j)."""
    _check_n(n)
    field_ = SpectralField(x, y, t)
    return enumerate_configs(n, n, BoundaryData.dwbc(n), field_).partition_function


def row_horizontal_count_bounds(n: int) -> dict:
    """Check that row k of every DWBC configuration has between 1 and k C1 vertices."""
    _check_n(n)
    from .core import WeightTable

    res = enumerate_configs(n, n, BoundaryData.dwbc(n), WeightTable.uniform(), keep_configs=True)
    for types, _ in res.configs:
        counts = (types == C1).sum(axis=0)
        for k in range(n):
            if not 1 <= counts[k] <= k + 1:
                return {
                    "passed": False,
                    "configs": res.count,
                    "counterexample": {"types": types.tolist(), "row": k + 1},
                }
    return {"passed": True, "configs": res.count, "counterexample": None}


def top_exit_distribution(n: int, x, y, t) -> Dict[int, complex]:
    """Boltzmann mass of each value of H_N (paths exiting through the top)."""
    _check_n(n)
    field_ = SpectralField(x, y, t)
    res = enumerate_configs(n, n, BoundaryData.step_free(n), field_)
    dist: Dict[int, complex] = {}
    for mask, (z, _) in res.by_top_mask.items():
        h = bin(mask).count("1")
        dist[h] = dist.get(h, 0j) + z
    return dist


def q_pochhammer_observable(h: int, t: complex, w: complex) -> complex:
    """(1 - w)(1 - w t) ... (1 - w t^{h-1})."""
    out = 1.0 + 0j
    for k in range(h):
        out *= 1 - w * t**k
    return out


def stochastic_free_observable(n: int, x, y, t, w) -> complex:
    """E[(1-w)(1-wt)...(1-wt^{H_N-1})] for step-in / free-exit boundary."""
    dist = top_exit_distribution(n, x, y, t)
    return sum(z * q_pochhammer_observable(h, t, w) for h, z in dist.items())


def height_histogram(n: int, x, y, t) -> Dict[int, float]:
    """Exact law of H_N; real probabilities in the positive regimes."""
    dist = top_exit_distribution(n, x, y, t)
    out = {}
    for h in range(n + 1):
        p = dist.get(h, 0j)
        out[h] = p.real if abs(p.imag) < 1e-12 else p
    return out
