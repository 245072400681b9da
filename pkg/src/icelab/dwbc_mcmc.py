"""Metropolis flip dynamics for DWBC six-vertex configurations.

A move picks an inner face uniformly at random.  If the four edges around it
form a corner of a path (right-then-up or up-then-right) the corner is
flipped, which changes the face height by one and re-draws the four vertex
types around the face.  The flip is accepted with probability
``min(1, W_new / W_old)`` over those four vertices.  Proposals are symmetric,
so the chain is reversible with respect to the Boltzmann measure.

Face ``(a, b)`` (``0 <= a, b <= N - 2``) is bounded by columns ``a, a+1`` and
rows ``b, b+1``.  With the edge grids of :class:`SixVertexConfig` its edges
are ``v[a, b+1]`` (left), ``v[a+1, b+1]`` (right), ``h[a+1, b]`` (bottom)
and ``h[a+1, b+1]`` (top).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numba
import numpy as np

from .core import TYPE_LOOKUP, SixVertexConfig, VertexType, WeightTable, delta
from .rng import _u64, default_seed, draw_u64, stream_key

C1 = int(VertexType.C1)
B1 = int(VertexType.B1)
B2 = int(VertexType.B2)


class InsufficientSamplesError(ValueError):
    pass


def delta_zero_weights(theta: float) -> WeightTable:
    """Positive Delta = 0 representative (1, 1, b, b, c, c), b = tan(theta/2), c = sec(theta/2).

    At t = -1 and u = exp(i theta) the spectral weights have
    b1 b2 = tan^2(theta/2) and c1 c2 = sec^2(theta/2), which together with
    a1 = a2 = 1 fix every gauge-invariant ratio.
    """
    if not 0 < theta < math.pi:
        raise ValueError("theta must lie in (0, pi)")
    b = math.tan(theta / 2)
    c = 1 / math.cos(theta / 2)
    return WeightTable(1.0, 1.0, b, b, c, c)


def delta_zero_gamma(theta: float) -> float:
    """gamma = sin^2(theta/2) = (1 - u)(1 - 1/u)/4 at u = exp(i theta)."""
    return math.sin(theta / 2) ** 2


@dataclass(frozen=True)
class McmcParams:
    n: int
    weights: str = "uniform"  # "uniform" or "dz:<theta>"
    sweeps: int = 1000
    burnin: Optional[int] = None  # sweeps; default 10 N^2
    thin: int = 1  # sweeps between recorded states
    seed: int = field(default_factory=default_seed)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need N >= 2")
        self.table()  # validates the weight spec

    def theta(self) -> Optional[float]:
        if self.weights == "uniform":
            return None
        if self.weights.startswith("dz:"):
            return float(self.weights[3:])
        raise ValueError(f"unknown weight spec {self.weights!r}")

    def table(self) -> WeightTable:
        th = self.theta()
        return WeightTable.uniform() if th is None else delta_zero_weights(th)

    def centering(self) -> tuple[float, float]:
        """(mean, scale) used to standardize positions: gamma N, sqrt(gamma(1-gamma) N) style."""
        th = self.theta()
        if th is None:
            return self.n / 2, math.sqrt(3 * self.n / 8)
        g = delta_zero_gamma(th)
        return g * self.n, math.sqrt(g * (1 - g) * self.n)

    def burnin_sweeps(self) -> int:
        return 10 * self.n**2 if self.burnin is None else self.burnin

    def faces(self) -> int:
        return (self.n - 1) ** 2


_LOOKUP = TYPE_LOOKUP.copy()


@numba.njit(cache=True)
def _vtype(v, h, i, j):
    return _LOOKUP[v[i, j] * 8 + h[i, j] * 4 + v[i, j + 1] * 2 + h[i + 1, j]]


@numba.njit(cache=True)
def _corner_weight(v, h, a, b, logw):
    return (
        logw[_vtype(v, h, a, b)]
        + logw[_vtype(v, h, a + 1, b)]
        + logw[_vtype(v, h, a, b + 1)]
        + logw[_vtype(v, h, a + 1, b + 1)]
    )


@numba.njit(cache=True)
def flippable(v, h, a, b):
    """+1 if the face can be raised, -1 if lowered, 0 otherwise."""
    L = v[a, b + 1]
    R = v[a + 1, b + 1]
    B = h[a + 1, b]
    T = h[a + 1, b + 1]
    if L == 0 and R == 1 and B == 1 and T == 0:
        return 1
    if L == 1 and R == 0 and B == 0 and T == 1:
        return -1
    return 0


@numba.njit(cache=True)
def _toggle(v, h, a, b):
    v[a, b + 1] ^= 1
    v[a + 1, b + 1] ^= 1
    h[a + 1, b] ^= 1
    h[a + 1, b + 1] ^= 1


@numba.njit(cache=True)
def _run_steps(v, h, logw, uniform, key, counter, steps):
    """Advance the chain ``steps`` proposals; returns accepted count.

    Proposal ``s`` uses counter ``2s`` for the face and ``2s + 1`` for the
    acceptance draw.
    """
    m = v.shape[0] - 1  # faces per side
    acc = 0
    mask32 = np.uint64(0xFFFFFFFF)
    s32 = np.uint64(32)
    um = np.uint64(m)
    for s in range(steps):
        c = counter + np.uint64(2 * s)
        x = draw_u64(key, c)
        a = np.int64(((x & mask32) * um) >> s32)
        b = np.int64(((x >> s32) * um) >> s32)
        if flippable(v, h, a, b) == 0:
            continue
        if uniform:
            _toggle(v, h, a, b)
            acc += 1
            continue
        before = _corner_weight(v, h, a, b, logw)
        _toggle(v, h, a, b)
        d = _corner_weight(v, h, a, b, logw) - before
        if d < 0.0:
            r = float(draw_u64(key, c + np.uint64(1)) >> np.uint64(11)) * (1.0 / 9007199254740992.0)
            if r >= math.exp(d):
                _toggle(v, h, a, b)
                continue
        acc += 1
    return acc


@numba.njit(cache=True)
def _empty_above(v, j, out):
    """1-based columns of empty vertical edges above row j; returns count."""
    n = v.shape[0]
    c = 0
    for i in range(n):
        if v[i, j + 1] == 0:
            if c < out.shape[0]:
                out[c] = i + 1
            c += 1
    return c


@numba.njit(cache=True)
def _record(v, h, k, xi, Xi, nc1, nb):
    """Fill rows 0..k-1 of the corner observables for the current state."""
    n = v.shape[0]
    for j in range(k):
        c = 0
        bcount = 0
        for i in range(n):
            t = _vtype(v, h, i, j)
            if t == 4:
                if c < k:
                    xi[j, c] = i + 1
                c += 1
            elif t == 2 or t == 3:
                bcount += 1
        nc1[j] = c
        nb[j] = bcount
        _empty_above(v, j, Xi[j])


def _log_weights(w: WeightTable) -> np.ndarray:
    arr = w.as_array()
    if np.any(np.abs(arr.imag) > 0) or np.any(arr.real <= 0):
        raise ValueError("MCMC needs real positive weights; gauge-transform first")
    return np.log(arr.real)


@dataclass
class ChainState:
    """Mutable chain: edge grids plus the RNG counter."""

    n: int
    v: np.ndarray
    h: np.ndarray
    logw: np.ndarray
    uniform: bool
    key: np.uint64
    counter: int = 0
    accepted: int = 0

    @classmethod
    def start(cls, p: McmcParams, stream: int = 0) -> "ChainState":
        cfg = SixVertexConfig.dwbc_identity(p.n)
        lw = _log_weights(p.table())
        return cls(
            p.n,
            cfg.vertical.copy(),
            cfg.horizontal.copy(),
            lw,
            bool(np.all(lw == lw[0])),
            np.uint64(stream_key(_u64(p.seed), _u64(stream))),
        )

    def advance(self, steps: int) -> None:
        if self.n < 2 or steps <= 0:
            return
        self.accepted += _run_steps(
            self.v, self.h, self.logw, self.uniform, self.key, np.uint64(self.counter), steps
        )
        self.counter += 2 * steps

    def sweep(self, count: int = 1) -> None:
        self.advance(count * (self.n - 1) ** 2)

    def config(self) -> SixVertexConfig:
        return SixVertexConfig(self.n, self.n, self.v.copy(), self.h.copy())


def mcmc_run(p: McmcParams, samples: int, stream: int = 0):
    """Yield ``samples`` thinned configurations after burn-in."""
    st = ChainState.start(p, stream)
    st.sweep(p.burnin_sweeps())
    for _ in range(samples):
        st.sweep(p.thin)
        yield st.config()


@dataclass
class CornersObservables:
    """Observables of rows 1..k (1-based columns throughout)."""

    k: int
    xi: list  # xi[j] = C1 positions in row j+1
    Xi: list  # Xi[j] = empty vertical edges above row j+1
    b_counts: np.ndarray
    c1_counts: np.ndarray

    def generic(self) -> bool:
        """Strict interlacing and exactly j C1 vertices in row j, for j <= k."""
        if any(self.c1_counts[j] != j + 1 for j in range(self.k)):
            return False
        for j in range(1, self.k):
            lo, hi = self.Xi[j], self.Xi[j - 1]
            for i in range(j):
                if not lo[i] < hi[i] < lo[i + 1]:
                    return False
        return True

    def interlacing(self) -> bool:
        for j in range(1, self.k):
            lo, hi = self.Xi[j], self.Xi[j - 1]
            for i in range(j):
                if not lo[i] <= hi[i] <= lo[i + 1]:
                    return False
        return True

    def eta(self, n: int, gamma: float) -> np.ndarray:
        """eta_j from #b(row j) = gamma N + sqrt(N) eta_j."""
        return (self.b_counts - gamma * n) / math.sqrt(n)


def corners_extract(cfg: SixVertexConfig, k: int) -> CornersObservables:
    n = cfg.width
    if cfg.height != n or not 1 <= k <= n:
        raise ValueError("need an N x N configuration and 1 <= k <= N")
    xi = np.zeros((k, k), dtype=np.int64)
    Xi = np.zeros((k, k), dtype=np.int64)
    nc1 = np.zeros(k, dtype=np.int64)
    nb = np.zeros(k, dtype=np.int64)
    _record(cfg.vertical, cfg.horizontal, k, xi, Xi, nc1, nb)
    return CornersObservables(
        k,
        [list(xi[j, : min(nc1[j], k)]) for j in range(k)],
        [list(Xi[j, : j + 1]) for j in range(k)],
        nb,
        nc1,
    )


def integrated_autocorrelation(x: np.ndarray, c: float = 5.0) -> float:
    """Integrated autocorrelation time with Sokal's automatic window."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 4:
        return 1.0
    y = x - x.mean()
    var = y.var()
    if var == 0:
        return 1.0
    m = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(y, m)
    acf = np.fft.irfft(f * np.conj(f), m)[:n] / (var * n)
    tau = 1.0
    for w in range(1, n):
        tau += 2 * acf[w]
        if w >= c * tau:
            break
    return max(tau, 1.0)


# ---------------------------------------------------------------------------
# recorded runs and the GUE-corners comparison


@numba.njit(cache=True)
def _run_recorded(v, h, logw, uniform, key, counter, steps_between, records, k,
                  out_xi, out_Xi, out_nc1, out_nb):
    """Record corner observables every ``steps_between`` proposals; returns the new counter."""
    acc = 0
    for r in range(records):
        acc += _run_steps(v, h, logw, uniform, key, counter, steps_between)
        counter += np.uint64(2 * steps_between)
        _record(v, h, k, out_xi[r], out_Xi[r], out_nc1[r], out_nb[r])
    return counter, acc


@dataclass
class RecordedRun:
    """Corner observables of ``records`` states, one per ``thin`` sweeps."""

    n: int
    k: int
    thin: int
    xi: np.ndarray  # (R, k, k), C1 positions per row (zero padded)
    Xi: np.ndarray  # (R, k, k), empty edges above each row (zero padded)
    c1_counts: np.ndarray  # (R, k)
    b_counts: np.ndarray  # (R, k)

    def __len__(self) -> int:
        return self.xi.shape[0]

    def concat(self, other: "RecordedRun") -> "RecordedRun":
        return RecordedRun(
            self.n, self.k, self.thin,
            np.concatenate([self.xi, other.xi]),
            np.concatenate([self.Xi, other.Xi]),
            np.concatenate([self.c1_counts, other.c1_counts]),
            np.concatenate([self.b_counts, other.b_counts]),
        )

    def row1_position(self) -> np.ndarray:
        """sum_i xi_i^1; row 1 always holds a single C1 vertex."""
        return self.xi[:, 0, :].sum(axis=1)


def run_recorded(st: ChainState, k: int, records: int, thin: int) -> RecordedRun:
    xi = np.zeros((records, k, k), dtype=np.int64)
    Xi = np.zeros((records, k, k), dtype=np.int64)
    nc1 = np.zeros((records, k), dtype=np.int64)
    nb = np.zeros((records, k), dtype=np.int64)
    steps = thin * (st.n - 1) ** 2
    counter, acc = _run_recorded(
        st.v, st.h, st.logw, st.uniform, st.key, np.uint64(st.counter), steps, records, k,
        xi, Xi, nc1, nb,
    )
    st.counter = int(counter)
    st.accepted += int(acc)
    return RecordedRun(st.n, k, thin, xi, Xi, nc1, nb)


@dataclass(frozen=True)
class IdentityReport:
    samples: int
    interlacing_failures: int
    row1_failures: int  # Xi_1^1 != #b(row 1) + 1
    trace_failures: int  # telescoping identity on generic samples
    c1_bound_failures: int  # #C1 in row j outside [1, j]
    generic: np.ndarray  # per-sample flag

    @property
    def ok(self) -> bool:
        return not (self.interlacing_failures or self.row1_failures
                    or self.trace_failures or self.c1_bound_failures)


def check_identities(run: RecordedRun) -> IdentityReport:
    k = run.k
    R = len(run)
    inter = 0
    strict_ok = np.ones(R, dtype=bool)
    for j in range(1, k):
        lo = run.Xi[:, j, : j + 1]
        hi = run.Xi[:, j - 1, :j]
        weak = (lo[:, :-1] <= hi) & (hi <= lo[:, 1:])
        strict = (lo[:, :-1] < hi) & (hi < lo[:, 1:])
        inter += int(np.sum(~weak.all(axis=1)))
        strict_ok &= strict.all(axis=1)
    counts_ok = np.all(run.c1_counts == np.arange(1, k + 1)[None, :], axis=1)
    generic = strict_ok & counts_ok
    row1 = int(np.sum(run.Xi[:, 0, 0] != run.b_counts[:, 0] + 1))
    sums = np.array([run.Xi[:, j, : j + 1].sum(axis=1) for j in range(k)]).T  # (R, k)
    prev = np.concatenate([np.zeros((R, 1), dtype=np.int64), sums[:, :-1]], axis=1)
    tele = sums - prev == run.b_counts + np.arange(1, k + 1)[None, :]
    trace = int(np.sum(generic & ~tele.all(axis=1)))
    bound = int(np.sum((run.c1_counts < 1) | (run.c1_counts > np.arange(1, k + 1)[None, :])))
    return IdentityReport(R, inter, row1, trace, bound, generic)


@dataclass
class CornersReport:
    n: int
    k: int
    weights: str
    burnin: int
    thin: int
    iat: float
    samples: int
    effective_samples: float
    generic_fraction: float
    row_exact_fraction: list  # P(#C1 in row j = j)
    ks_row1_normal: float
    ks_vs_gue: dict  # (j, i) -> two-sample KS distance
    mean_gap: float
    cov_gap: float
    identities: IdentityReport
    run: RecordedRun = field(repr=False)

    def summary(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "weights": self.weights,
            "burnin_sweeps": self.burnin,
            "thin_sweeps": self.thin,
            "iat_sweeps": self.iat,
            "samples": self.samples,
            "effective_samples": self.effective_samples,
            "generic_fraction": self.generic_fraction,
            "row_exact_fraction": self.row_exact_fraction,
            "ks_row1_normal": self.ks_row1_normal,
            "ks_vs_gue": {f"{j},{i}": v for (j, i), v in self.ks_vs_gue.items()},
            "mean_gap": self.mean_gap,
            "cov_gap": self.cov_gap,
            "identities_ok": self.identities.ok,
        }


def _ks_normal(z: np.ndarray) -> float:
    from scipy.special import ndtr

    from .stochastic import ks_distance

    return ks_distance(z, lambda v: ndtr(v))


def gue_corners_test(p: McmcParams, k: int = 3, target: int = 2000, reference: int = 20000,
                     pilot_sweeps: int | None = None, max_sweeps: int | None = None,
                     stream: int = 0) -> CornersReport:
    """Run the flip chain and compare rows 1..k with the GUE corners process.

    A pilot run estimates the integrated autocorrelation time (in sweeps)
    of the row-1 C1 position; the chain is then thinned to about twice that
    and run until ``target`` thinned samples exist.
    """
    from scipy.stats import ks_2samp

    from .rmt import gue_corners_samples

    if not 1 <= k <= 4:
        raise ValueError("k must lie in 1..4")
    st = ChainState.start(p, stream)
    st.sweep(p.burnin_sweeps())
    pilot_sweeps = pilot_sweeps or max(2000, 2 * p.n * p.n)
    pilot = run_recorded(st, k, pilot_sweeps, 1)
    tau = integrated_autocorrelation(pilot.row1_position())
    thin = max(p.thin, int(math.ceil(2 * tau)))
    if max_sweeps is not None and target * thin > max_sweeps:
        raise InsufficientSamplesError(
            f"{target} samples at thinning {thin} need {target * thin} sweeps > {max_sweeps}"
        )
    run = run_recorded(st, k, target, thin)
    ident = check_identities(run)
    ess = len(run) * thin / tau
    if ess < target:
        raise InsufficientSamplesError(f"effective sample size {ess:.0f} below {target}")
    mu, sc = p.centering()
    z = (run.Xi.astype(float) - mu) / sc  # (R, k, k)
    gue = gue_corners_samples(k, reference, seed=p.seed)
    ks = {}
    for j in range(k):
        for i in range(j + 1):
            ks[(j + 1, i + 1)] = float(ks_2samp(z[:, j, i], gue[:, j, i]).statistic)
    mask = np.tril(np.ones((k, k), dtype=bool))
    zf = z[:, mask]
    gf = gue[:, mask]
    mean_gap = float(np.max(np.abs(zf.mean(axis=0) - gf.mean(axis=0))))
    cov_gap = float(np.max(np.abs(np.cov(zf.T) - np.cov(gf.T))))
    exact = [float(np.mean(run.c1_counts[:, j] == j + 1)) for j in range(k)]
    return CornersReport(
        p.n, k, p.weights, p.burnin_sweeps(), thin, float(tau), len(run), float(ess),
        float(ident.generic.mean()), exact, _ks_normal(z[:, 0, 0]), ks, mean_gap, cov_gap,
        ident, run,
    )
