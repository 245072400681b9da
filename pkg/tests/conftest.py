import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def distinct(rng, n, lo=0.1, hi=0.9, gap=1e-2):
    while True:
        v = rng.uniform(lo, hi, n)
        if n == 1 or np.min(np.diff(np.sort(v))) >= gap:
            return v
