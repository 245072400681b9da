"""Counter-based random numbers.

Every draw is a pure function of ``(seed, stream, counter)``: the stream key
is a hashed combination of the seed and a stream index (e.g. the sample
number), and the counter indexes draws within the stream.  Output is the
SplitMix64 finalizer applied to ``key + (counter + 1) * GAMMA``, so streams
can be evaluated in any order or in parallel with identical results.
"""

from __future__ import annotations

import os

import numba
import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0

DEFAULT_SEED = 20240601


def default_seed() -> int:
    """Seed from ICELAB_SEED if set, else a fixed constant."""
    env = os.environ.get("ICELAB_SEED")
    return int(env, 0) if env else DEFAULT_SEED


@numba.njit(cache=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@numba.njit(cache=True)
def stream_key(seed, stream):
    """Key for stream ``stream`` of generator ``seed`` (both uint64)."""
    return mix64(mix64(np.uint64(seed) + GAMMA) ^ (np.uint64(stream) * _M2 + GAMMA))


@numba.njit(cache=True)
def draw_u64(key, counter):
    return mix64(np.uint64(key) + (np.uint64(counter) + np.uint64(1)) * GAMMA)


@numba.njit(cache=True)
def draw_uniform(key, counter):
    """Uniform double in [0, 1) with 53 random bits."""
    return float(draw_u64(key, counter) >> _S11) * _INV53


@numba.njit(cache=True)
def draw_normal_pair(key, counter):
    """Two independent N(0,1) draws by Box-Muller; consumes counters c, c+1."""
    u1 = draw_uniform(key, counter)
    u2 = draw_uniform(key, counter + np.uint64(1))
    r = np.sqrt(-2.0 * np.log(1.0 - u1))
    a = 2.0 * np.pi * u2
    return r * np.cos(a), r * np.sin(a)


def _u64(v) -> np.uint64:
    return np.uint64(int(v) & 0xFFFFFFFFFFFFFFFF)


class CounterRNG:
    """Stream-addressable generator; ``stream(i)`` gives the i-th substream."""

    def __init__(self, seed: int | None = None, stream: int = 0):
        self.seed = default_seed() if seed is None else int(seed)
        self.stream_index = int(stream)
        self.key = np.uint64(stream_key(_u64(self.seed), _u64(stream)))
        self.counter = 0

    def stream(self, index: int) -> "CounterRNG":
        return CounterRNG(self.seed, index)

    def _counters(self, n: int) -> np.ndarray:
        c = np.arange(self.counter, self.counter + n, dtype=np.uint64)
        self.counter += n
        return c

    def uniform(self, n: int) -> np.ndarray:
        return _uniform_block(self.key, self._counters(n))

    def normal(self, n: int) -> np.ndarray:
        m = n + (n & 1)
        out = _normal_block(self.key, self._counters(m))
        return out[:n]


@numba.njit(cache=True)
def _uniform_block(key, counters):
    out = np.empty(len(counters))
    for i in range(len(counters)):
        out[i] = draw_uniform(key, counters[i])
    return out


@numba.njit(cache=True)
def _normal_block(key, counters):
    out = np.empty(len(counters))
    for i in range(0, len(counters), 2):
        a, b = draw_normal_pair(key, counters[i])
        out[i] = a
        out[i + 1] = b
    return out
