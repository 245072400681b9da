"""The twelve end-to-end acceptance checks, shared by the test-suite and ``icelab suite``.

Each check returns a :class:`CriterionResult`; ``passed`` is the conjunction
of every tolerance and the wall-clock budget.  Nothing here loosens a
tolerance to make a check pass.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

SEED = 20240601


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    runtime: float
    budget: float
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k}={_fmt(v)}" for k, v in self.details.items())
        return (f"[{status}] criterion {self.number:2d} {self.name}: {parts} "
                f"(runtime {self.runtime:.1f}s, budget {self.budget:.0f}s)")


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(a) for a in v) + "]"
    return str(v)


def _distinct(rng, n, lo, hi, gap=1e-3):
    while True:
        v = rng.uniform(lo, hi, n)
        if n == 1 or np.min(np.diff(np.sort(v))) >= gap:
            return v


# ---------------------------------------------------------------------------


def c01_ik() -> dict:
    from .determinants import SpectralVectors, ik_rhs
    from .enumeration import dwbc_partition

    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for n in range(1, 5):
        for _ in range(50):
            x = _distinct(rng, n, 0.1, 1.0)
            y = _distinct(rng, n, 0.1, 1.0)
            t = rng.uniform(0.05, 0.95)
            z = dwbc_partition(n, x, y, t)
            worst = max(worst, abs(z - ik_rhs(SpectralVectors(x, y, t))) / abs(z))
    return {"max_rel_err": worst, "ok": worst < 1e-10}


def c02_ikfree() -> dict:
    from .determinants import SpectralVectors, free_ik_rhs
    from .enumeration import stochastic_free_observable

    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for n in range(1, 5):
        for _ in range(50):
            x = _distinct(rng, n, 0.1, 1.0)
            y = _distinct(rng, n, 0.1, 1.0)
            t = rng.uniform(0.05, 0.95)
            w = 2 * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
            ref = stochastic_free_observable(n, x, y, t, w)
            val = free_ik_rhs(SpectralVectors(x, y, t), w)
            worst = max(worst, abs(ref - val) / abs(ref))
    return {"max_rel_err": worst, "ok": worst < 1e-10}


def c03_ybe() -> dict:
    from .yang_baxter import ybe_matrix_check, ybe_scan

    rng = np.random.default_rng(SEED + 3)
    worst_scalar = 0.0
    worst_gap = 0.0
    for _ in range(100):
        u, v, t = rng.uniform(0.01, 0.99, 3)
        scalar, _ = ybe_scan(u, v, t)
        matrix = ybe_matrix_check(u, v, t)
        worst_scalar = max(worst_scalar, scalar)
        worst_gap = max(worst_gap, abs(scalar - matrix))
    return {"max_residual": worst_scalar, "scalar_vs_matrix": worst_gap,
            "ok": worst_scalar < 1e-12 and worst_gap < 1e-13}


def c04_schur_bridge() -> dict:
    from .determinants import SpectralVectors, free_ik_at_zero, free_ik_rhs, schur_sum_form

    rng = np.random.default_rng(SEED + 4)
    worst = 0.0
    for n in range(1, 4):
        for _ in range(5):
            x = _distinct(rng, n, 0.05, 0.5)
            y = _distinct(rng, n, 0.05, 0.5)
            t = rng.uniform(0.1, 0.9)
            w = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            val, bound = schur_sum_form(n, x, y, t, w)
            ref = free_ik_rhs(SpectralVectors(x, y, t), w)
            worst = max(worst, abs(val - ref) / max(1.0, abs(ref)))
    worst0 = 0.0
    for n in range(1, 4):
        for _ in range(5):
            y = _distinct(rng, n, 0.2, 0.8)
            t = rng.uniform(0.1, 0.9)
            w = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            target = np.prod([1 - w * t ** (n - i) for i in range(1, n + 1)])
            worst0 = max(worst0, abs(free_ik_at_zero(y, t, w) - target))
    return {"schur_vs_det": worst, "x_to_zero": worst0, "ok": worst < 1e-9 and worst0 < 1e-6}


def c05_contours() -> dict:
    from .contours import schur_qsum_contour
    from .schur import laplace_observable_bruteforce

    rng = np.random.default_rng(SEED + 5)
    err1 = err2 = 0.0
    for n in range(1, 4):
        for _ in range(3):
            x = _distinct(rng, n, 0.1, 0.5)
            y = _distinct(rng, n, 0.1, 0.5)
            q1, q2 = rng.uniform(0.3, 0.8, 2)
            for qs, tol_slot in (([q1], 1), ([q1, q2], 2)):
                ref = laplace_observable_bruteforce(n, x, y, qs)
                val = schur_qsum_contour(n, x, y, qs).value
                e = abs(val - ref) / abs(ref)
                if tol_slot == 1:
                    err1 = max(err1, e)
                else:
                    err2 = max(err2, e)
    return {"k1_rel_err": err1, "k2_rel_err": err2, "ok": err1 < 1e-8 and err2 < 1e-7}


def c06_oneq() -> dict:
    from .contours import oneq_limit_value, oneq_scaling_sequence

    worst = 0.0
    for s in (0.5, 1.0, 2.0):
        for u in (0.16, 0.25, 0.49):
            (_, val, _), = oneq_scaling_sequence(s, u, [2000])
            lim, _ = oneq_limit_value(s, u)
            worst = max(worst, abs(val / lim - 1))
    return {"max_rel_gap": worst, "ok": worst < 0.05}


def c07_stochastic() -> dict:
    from .stochastic import StochasticParams, height_statistics

    batch = height_statistics(StochasticParams(1000, 0.25, 0.5, seed=SEED, samples=5000))
    m = batch.meta
    mean_ok = abs(m["mean"] - 1.7711) <= 0.15
    ks_ok = m["ks_vs_F2"] < 0.1
    return {"mean": m["mean"], "var": m["var"], "ks": m["ks_vs_F2"], "ok": mean_ok and ks_ok}


def c08_sampler_exact() -> dict:
    from .core import BoundaryData, SixVertexConfig, SpectralParams, weights_from_spectral
    from .enumeration import enumerate_configs
    from .stochastic import StochasticParams, config_code, sample_codes

    n, u, t, samples = 3, 0.5, 0.5, 10**6
    w = weights_from_spectral(SpectralParams(u, t))
    res = enumerate_configs(n, n, BoundaryData.step_free(n), w, keep_configs=True)
    probs = {}
    for types, wt in res.configs:
        probs[config_code(SixVertexConfig.from_types(types))] = (wt / res.partition_function).real
    codes = sample_codes(StochasticParams(n, u, t, seed=SEED, samples=samples))
    keys, counts = np.unique(codes, return_counts=True)
    unknown = int(sum(c for k, c in zip(keys, counts) if int(k) not in probs))
    observed = dict(zip((int(k) for k in keys), counts))
    worst = 0.0
    for code, p in probs.items():
        sd = math.sqrt(samples * p * (1 - p))
        worst = max(worst, abs(observed.get(code, 0) - samples * p) / sd)
    return {"configs": len(probs), "max_sigma": worst, "unknown": unknown,
            "ok": worst < 4 and unknown == 0}


def c09_gue_corners() -> dict:
    from .dwbc_mcmc import McmcParams, gue_corners_test

    rep = gue_corners_test(McmcParams(128, "uniform", seed=SEED), k=3, target=2000)
    exact = rep.row_exact_fraction
    ok = (all(f > 0.9 for f in exact) and rep.ks_row1_normal < 0.08
          and rep.identities.ok and rep.effective_samples >= 2000)
    return {"row_exact": exact, "ks_row1": rep.ks_row1_normal, "ess": rep.effective_samples,
            "iat": rep.iat, "identities_ok": rep.identities.ok, "ok": ok}


def c10_f2() -> dict:
    from .airy import tracy_widom_f2, tracy_widom_moments
    from .rmt import gue_edge_check

    grid = np.linspace(-6, 4, 21)
    stab = float(np.max(np.abs(tracy_widom_f2(grid, 64) - tracy_widom_f2(grid, 128))))
    mom = tracy_widom_moments()
    edge = gue_edge_check(400, 2000, seed=SEED)
    ok = (stab < 1e-8 and abs(mom.mean + 1.7711) < 1e-3 and abs(mom.variance - 0.8132) < 2e-3
          and edge.ks < 0.08)
    return {"doubling": stab, "mean": mom.mean, "var": mom.variance, "edge_ks": edge.ks, "ok": ok}


def c11_airy() -> dict:
    from .airy import airy_kernel, airy_kernel_integral, airy_moment_closed_form, airy_moment_lhs
    from .contours import airy_laplace_rhs

    kern = abs(airy_kernel_integral(0.0, 1.0) - airy_kernel(0.0, 1.0))
    k1 = max(abs(airy_moment_lhs(s).value - airy_moment_closed_form(s)) for s in (0.5, 1.0, 2.0))
    lhs = airy_moment_lhs([1.0, 1.0]).value
    rhs = airy_laplace_rhs([1.0, 1.0], v=[-0.6, 0.6]).value.real
    k2 = abs(lhs - rhs)
    return {"kernel_forms": kern, "k1": k1, "k2": k2, "ok": kern < 1e-8 and k1 < 1e-6 and k2 < 1e-4}


def c12_sigma() -> dict:
    from .stochastic import sigma_consistency

    gap = sigma_consistency(np.linspace(0.01, 0.99, 99))
    return {"max_rel_gap": gap, "ok": gap < 1e-12}


CRITERIA: dict[int, tuple[str, Callable[[], dict], float]] = {
    1: ("Izergin-Korepin determinant", c01_ik, 5),
    2: ("free-boundary determinant", c02_ikfree, 10),
    3: ("Yang-Baxter equation", c03_ybe, 1),
    4: ("Schur bridge", c04_schur_bridge, 30),
    5: ("contour observables", c05_contours, 60),
    6: ("steepest-descent limit", c06_oneq, 60),
    7: ("Tracy-Widom height fluctuations", c07_stochastic, 600),
    8: ("stochastic sampler exactness", c08_sampler_exact, 60),
    9: ("GUE corners from DWBC", c09_gue_corners, 1200),
    10: ("F2 numerics", c10_f2, 300),
    11: ("Airy identities", c11_airy, 120),
    12: ("scale-constant consistency", c12_sigma, 1),
}

QUICK = (1, 2, 3, 4, 5, 6, 8, 11, 12)


def run_criterion(number: int) -> CriterionResult:
    name, fn, budget = CRITERIA[number]
    t0 = time.perf_counter()
    details = fn()
    elapsed = time.perf_counter() - t0
    ok = bool(details.pop("ok")) and elapsed < budget
    return CriterionResult(number, name, ok, elapsed, budget, details)
