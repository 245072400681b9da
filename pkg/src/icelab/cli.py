"""Command-line entry point: ``icelab <command> [options]``.

Every run writes a JSON manifest (resolved arguments, seed, version,
wall-clock and results) next to its CSV outputs.  Files are written to a
temporary name and renamed into place.  Exit codes: 0 success, 1 usage or
I/O error, 2 tolerance failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .rng import default_seed

EXIT_OK, EXIT_USAGE, EXIT_TOLERANCE = 0, 1, 2


class UsageError(Exception):
    pass


class SchemaMismatchError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# output helpers


def _num(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_num(v) for v in r])
    return buf.getvalue()


def emit_plotdata(records: Iterable[dict], path: Path) -> Path:
    """Write records sharing one schema as a CSV with a header row."""
    records = list(records)
    if not records:
        raise SchemaMismatchError("no records to write")
    header = list(records[0].keys())
    for r in records:
        if list(r.keys()) != header:
            raise SchemaMismatchError(f"record keys {list(r.keys())} differ from {header}")
    write_atomic(path, csv_text(header, ([r[h] for h in header] for r in records)))
    return Path(path)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(a) for k, a in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(a) for a in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, Path):
        return str(v)
    return v


# ---------------------------------------------------------------------------
# commands; each returns (results dict, passed flag)


def _rng(args):
    return np.random.default_rng(args.seed)


def cmd_verify_ybe(args):
    from .yang_baxter import ybe_matrix_check, ybe_scan

    if args.draws:
        rng = _rng(args)
        params = [tuple(rng.uniform(0.01, 0.99, 3)) for _ in range(args.draws)]
    else:
        params = [(args.u, args.v, args.t)]
    worst, where, mat, gap = 0.0, None, 0.0, 0.0
    for u, v, t in params:
        r, b = ybe_scan(u, v, t)
        m = ybe_matrix_check(u, v, t)
        gap = max(gap, abs(r - m))
        mat = max(mat, m)
        if r >= worst:
            worst, where = r, {"u": u, "v": v, "t": t, "boundary": list(b)}
    res = {"max_residual": worst, "worst_boundary": where, "matrix_residual": mat,
           "scalar_vs_matrix": gap, "error_estimate": "exact arithmetic identity"}
    return res, worst < args.tol


def _random_vectors(rng, n, lo=0.1, hi=1.0, gap=1e-3):
    while True:
        v = rng.uniform(lo, hi, n)
        if n == 1 or np.min(np.diff(np.sort(v))) >= gap:
            return v


def cmd_verify_ik(args):
    from .determinants import SpectralVectors, free_ik_rhs, ik_rhs
    from .enumeration import dwbc_partition, stochastic_free_observable

    rng = _rng(args)
    worst = 0.0
    for _ in range(args.draws):
        x = _random_vectors(rng, args.n)
        y = _random_vectors(rng, args.n)
        t = rng.uniform(0.05, 0.95)
        sv = SpectralVectors(x, y, t)
        if args.free:
            w = 2 * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
            ref, val = stochastic_free_observable(args.n, x, y, t, w), free_ik_rhs(sv, w)
        else:
            ref, val = dwbc_partition(args.n, x, y, t), ik_rhs(sv)
        worst = max(worst, abs(ref - val) / abs(ref))
    return {"n": args.n, "draws": args.draws, "max_rel_err": worst,
            "error_estimate": "enumeration oracle"}, worst < args.tol


def cmd_enum(args):
    from .core import BoundaryData, SpectralParams, WeightTable, asm_count, weights_from_spectral
    from .enumeration import enumerate_configs

    w = WeightTable.uniform() if args.u is None else weights_from_spectral(SpectralParams(args.u, args.t))
    bd = BoundaryData.dwbc(args.n) if args.boundary == "dwbc" else BoundaryData.step_free(args.n)
    res = enumerate_configs(args.n, args.n, bd, w)
    out = {"n": args.n, "boundary": args.boundary, "count": res.count,
           "partition_function": complex(res.partition_function), "error_estimate": "exact"}
    if args.boundary == "dwbc":
        out["asm_count"] = asm_count(args.n)
    else:
        dist = {}
        for mask, (z, _) in res.by_top_mask.items():
            h = bin(mask).count("1")
            dist[h] = dist.get(h, 0) + z
        out["height_distribution"] = {str(h): complex(z / res.partition_function)
                                      for h, z in sorted(dist.items())}
    return out, True


def cmd_schur_expect(args):
    from .determinants import SpectralVectors, free_ik_rhs, schur_sum_form

    x, y = np.array(args.x), np.array(args.y)
    if len(x) != len(y):
        raise UsageError("--x and --y need equal lengths")
    n = len(x)
    val, bound = schur_sum_form(n, x, y, args.t, args.w, args.cutoff)
    det = free_ik_rhs(SpectralVectors(x, y, args.t), args.w)
    diff = abs(val - det)
    return {"value": val, "tail_bound": bound, "determinant": det, "difference": diff,
            "error_estimate": bound}, diff < args.tol


def cmd_contour_qsum(args):
    from .contours import schur_qsum_contour
    from .schur import laplace_observable_bruteforce

    x, y = np.array(args.x), np.array(args.y)
    if len(x) != len(y):
        raise UsageError("--x and --y need equal lengths")
    n = len(x)
    r = schur_qsum_contour(n, x, y, args.q)
    ref = laplace_observable_bruteforce(n, x, y, args.q)
    rel = abs(r.value - ref) / abs(ref)
    return {"value": r.value, "error_estimate": r.error, "nodes": r.nodes, "bruteforce": ref,
            "rel_diff": rel}, rel < args.tol


def cmd_contour_oneq(args):
    from .contours import oneq_limit_value, oneq_scaling_sequence

    seq = oneq_scaling_sequence(args.s, args.u, args.ns)
    lim, alpha = oneq_limit_value(args.s, args.u)
    records = [{"N": n, "scaled_value": v, "limit_value": lim, "error_estimate": e} for n, v, e in seq]
    emit_plotdata(records, args.out / "oneq.csv")
    gap = abs(seq[-1][1] / lim - 1)
    return {"s": args.s, "u": args.u, "alpha": alpha, "limit_value": lim, "sequence": records,
            "final_rel_gap": gap}, gap < args.tol


def cmd_contour_airy(args):
    from .airy import airy_moment_lhs
    from .contours import airy_laplace_rhs

    s = args.s
    v = None if len(s) == 1 else [-0.6 * s[0], 0.6 * s[1]]
    rhs = airy_laplace_rhs(s, v=v)
    lhs = airy_moment_lhs(s)
    diff = abs(lhs.value - rhs.value.real)
    return {"s": s, "contour_value": rhs.value, "contour_error": rhs.error, "quadrature_value": lhs.value,
            "tail_bound": lhs.tail_bound, "difference": diff, "error_estimate": rhs.error}, diff < args.tol


def cmd_sample_stochastic(args):
    from .stochastic import CDF_GRID, StochasticParams, height_statistics

    p = StochasticParams(args.n, args.u, args.t, seed=args.seed, samples=args.samples)
    batch = height_statistics(p)
    write_atomic(args.out / "heights.csv", csv_text(
        ["sample_id", "H_N", "standardized"],
        zip(batch["sample_id"], batch["H_N"], batch["standardized"])))
    emit_plotdata(({"s": s, "F_hat": f} for s, f in zip(CDF_GRID, batch.meta["cdf_empirical"])),
                  args.out / "cdf.csv")
    meta = dict(batch.meta)
    meta.pop("cdf_grid")
    meta.pop("cdf_empirical")
    meta["rng"] = batch.rng
    meta["error_estimate"] = {"mean_stderr": math.sqrt(meta["var"] / max(args.samples, 1))}
    return meta, True


def cmd_mcmc_dwbc(args):
    from .dwbc_mcmc import ChainState, McmcParams, check_identities, run_recorded

    p = McmcParams(args.n, args.weights, sweeps=args.sweeps, burnin=args.burnin, thin=args.thin,
                   seed=args.seed)
    st = ChainState.start(p)
    st.sweep(p.burnin_sweeps())
    records = max(1, args.sweeps // args.thin)
    run = run_recorded(st, args.k, records, args.thin)
    ident = check_identities(run)
    rows = []
    for s in range(len(run)):
        for j in range(args.k):
            for i in range(j + 1):
                rows.append((s, j + 1, i + 1, run.xi[s, j, i], run.Xi[s, j, i], ident.generic[s]))
    write_atomic(args.out / "corners.csv",
                 csv_text(["sample_id", "j", "i", "xi", "Xi", "generic_flag"], rows))
    mu, sc = p.centering()
    return {
        "n": args.n, "weights": args.weights, "burnin_sweeps": p.burnin_sweeps(), "thin": args.thin,
        "samples": len(run), "acceptance_rate": st.accepted / max(st.counter // 2, 1),
        "centering": mu, "scale": sc, "generic_fraction": float(ident.generic.mean()),
        "row_exact_fraction": [float(np.mean(run.c1_counts[:, j] == j + 1)) for j in range(args.k)],
        "identities_ok": ident.ok, "interlacing_failures": ident.interlacing_failures,
        "trace_failures": ident.trace_failures, "error_estimate": "Monte Carlo; see acceptance suite",
    }, ident.ok


def cmd_rmt_f2(args):
    from .airy import tracy_widom_f2

    s = np.array(args.s, dtype=float)
    v = tracy_widom_f2(s, args.m)
    fine = tracy_widom_f2(s, 2 * args.m)
    err = np.abs(fine - v)
    emit_plotdata(({"s": a, "F2": b, "error_estimate": e} for a, b, e in zip(s, v, err)),
                  args.out / "f2.csv")
    return {"s": s, "F2": v, "error_estimate": err}, bool(np.all(err < 1e-8))


def cmd_rmt_corners(args):
    from .rmt import gue_corners_samples

    arr = gue_corners_samples(args.k, args.samples, args.seed)
    rows = ((s, j + 1, i + 1, arr[s, j, i])
            for s in range(args.samples) for j in range(args.k) for i in range(j + 1))
    write_atomic(args.out / "gue_corners.csv", csv_text(["sample", "j", "i", "value"], rows))
    m11 = arr[:, 0, 0]
    return {"k": args.k, "samples": args.samples, "m11_mean": m11.mean(), "m11_var": m11.var(),
            "error_estimate": {"m11_var_stderr": math.sqrt(2 / max(args.samples, 1))}}, True


def cmd_rmt_edge(args):
    from .rmt import gue_edge_check

    rep = gue_edge_check(args.n, args.samples, args.seed)
    write_atomic(args.out / "gue_edge.csv",
                 csv_text(["sample", "rescaled_top"], enumerate(rep.rescaled)))
    return {"n": rep.n, "samples": rep.samples, "mean": rep.mean, "var": rep.var, "ks_vs_F2": rep.ks,
            "min_gap": rep.min_gap, "error_estimate": {"mean_stderr": math.sqrt(rep.var / rep.samples)}}, \
        rep.ks < args.tol


def cmd_suite(args):
    from .acceptance import CRITERIA, QUICK, run_criterion

    which = args.only or (list(QUICK) if args.quick else sorted(CRITERIA))
    results = []
    for c in which:
        r = run_criterion(c)
        print(r.line(), flush=True)
        results.append({"criterion": r.number, "name": r.name, "passed": r.passed,
                        "runtime": r.runtime, **r.details})
    return {"criteria": results}, all(r["passed"] for r in results)


# ---------------------------------------------------------------------------
# parser


def _floats(s: str):
    return [float(a) for a in s.split(",") if a.strip()]


def _ints(s: str):
    return [int(a) for a in s.split(",") if a.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", type=Path, default=Path("icelab_out"), help="output directory")
    common.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                        help="RNG seed (default: $ICELAB_SEED or a fixed constant)")
    common.add_argument("--threads", type=int, default=None, help="numba worker threads")
    common.add_argument("--tol", type=float, default=None, help="override the pass tolerance")

    p = _Parser(prog="icelab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"icelab {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def leaf(parent, name, func, tol, help_):
        q = parent.add_parser(name, parents=[common], help=help_)
        q.set_defaults(func=func, default_tol=tol, run_name=name)
        return q

    verify = sub.add_parser("verify", help="exact identities").add_subparsers(
        dest="what", parser_class=_Parser, required=True)
    q = leaf(verify, "ybe", cmd_verify_ybe, 1e-12, "Yang-Baxter equation over all 64 boundaries")
    q.add_argument("--u", type=float, default=0.3)
    q.add_argument("--v", type=float, default=0.7)
    q.add_argument("--t", type=float, default=0.4)
    q.add_argument("--draws", type=int, default=0, help="random (u, v, t) draws instead of one point")
    for name, free in (("ik", False), ("ikfree", True)):
        q = leaf(verify, name, cmd_verify_ik, 1e-10, "determinant against enumeration")
        q.add_argument("--n", type=int, default=3)
        q.add_argument("--draws", type=int, default=20)
        q.set_defaults(free=free)

    q = leaf(sub, "enum", cmd_enum, 0.0, "exhaustive enumeration on an N x N square")
    q.add_argument("--n", type=int, default=3)
    q.add_argument("--boundary", choices=["dwbc", "step"], default="dwbc")
    q.add_argument("--u", type=float, default=None, help="spectral weights (default: all ones)")
    q.add_argument("--t", type=float, default=0.5)

    schur = sub.add_parser("schur", help="Schur measure").add_subparsers(
        dest="what", parser_class=_Parser, required=True)
    q = leaf(schur, "expect", cmd_schur_expect, 1e-9, "truncated Schur sum against the determinant")
    q.add_argument("--x", type=_floats, required=True)
    q.add_argument("--y", type=_floats, required=True)
    q.add_argument("--t", type=float, default=0.5)
    q.add_argument("--w", type=complex, default=0.5)
    q.add_argument("--cutoff", type=int, default=None)

    contour = sub.add_parser("contour", help="contour integrals").add_subparsers(
        dest="what", parser_class=_Parser, required=True)
    q = leaf(contour, "qsum", cmd_contour_qsum, 1e-7, "k <= 2 observable against brute force")
    q.add_argument("--x", type=_floats, required=True)
    q.add_argument("--y", type=_floats, required=True)
    q.add_argument("--q", type=_floats, required=True)
    q = leaf(contour, "oneq", cmd_contour_oneq, 0.05, "scaled one-point sequence against its limit")
    q.add_argument("--s", type=float, default=1.0)
    q.add_argument("--u", type=float, default=0.25)
    q.add_argument("--ns", type=_ints, default=[250, 500, 1000, 2000])
    q = leaf(contour, "airy", cmd_contour_airy, 1e-4, "Airy Laplace transforms, quadrature vs contour")
    q.add_argument("--s", type=_floats, default=[1.0])

    sample = sub.add_parser("sample", help="exact samplers").add_subparsers(
        dest="what", parser_class=_Parser, required=True)
    q = leaf(sample, "stochastic", cmd_sample_stochastic, 0.0, "stochastic six-vertex heights")
    q.add_argument("--n", type=int, default=1000)
    q.add_argument("--u", type=float, default=0.25)
    q.add_argument("--t", type=float, default=0.5)
    q.add_argument("--samples", type=int, default=5000)

    mcmc = sub.add_parser("mcmc", help="Markov chains").add_subparsers(
        dest="what", parser_class=_Parser, required=True)
    q = leaf(mcmc, "dwbc", cmd_mcmc_dwbc, 0.0, "flip chain for DWBC configurations")
    q.add_argument("--n", type=int, default=128)
    q.add_argument("--weights", default="uniform", help="uniform or dz:THETA")
    q.add_argument("--sweeps", type=int, default=1000)
    q.add_argument("--burnin", type=int, default=None, help="default 10 N^2 sweeps")
    q.add_argument("--thin", type=int, default=10)
    q.add_argument("--k", type=int, default=3)

    rmt = sub.add_parser("rmt", help="random-matrix references").add_subparsers(
        dest="what", parser_class=_Parser, required=True)
    q = leaf(rmt, "f2", cmd_rmt_f2, 1e-8, "Tracy-Widom F2 by Fredholm determinant")
    q.add_argument("--s", type=_floats, default=[-3.0, -2.0, -1.0, 0.0, 1.0])
    q.add_argument("--m", type=int, default=64)
    q = leaf(rmt, "corners", cmd_rmt_corners, 0.0, "GUE corners process samples")
    q.add_argument("--k", type=int, default=4)
    q.add_argument("--samples", type=int, default=10000)
    q = leaf(rmt, "edge", cmd_rmt_edge, 0.08, "rescaled top GUE eigenvalue against F2")
    q.add_argument("--n", type=int, default=400)
    q.add_argument("--samples", type=int, default=2000)

    q = leaf(sub, "suite", cmd_suite, 0.0, "acceptance criteria")
    q.add_argument("--quick", action="store_true", help="only the fast criteria")
    q.add_argument("--only", type=_ints, default=None, help="comma-separated criterion numbers")

    q = leaf(sub, "replay", None, 0.0, "re-run the command recorded in a manifest")
    q.add_argument("manifest", type=Path)
    return p


def _dispatch(argv: list[str]) -> int:
    args = build_parser().parse_args(argv)
    if args.run_name == "replay":
        try:
            recorded = json.loads(Path(args.manifest).read_text())["argv"]
        except (OSError, KeyError, ValueError) as e:
            raise UsageError(f"cannot read manifest: {e}") from e
        return _dispatch(list(recorded))
    if args.seed is None:
        args.seed = default_seed()
    if args.tol is None:
        args.tol = args.default_tol
    if args.threads:
        import numba

        numba.set_num_threads(max(1, min(args.threads, numba.config.NUMBA_NUM_THREADS)))
    t0 = time.time()
    results, passed = args.func(args)
    manifest = {
        "argv": argv,
        "command": " ".join(a for a in (args.command, getattr(args, "what", None)) if a),
        "config": {k: v for k, v in vars(args).items() if k not in ("func", "default_tol")},
        "seed": args.seed,
        "version": __version__,
        "started": time.strftime("%Y-%m-%dT%H:%M:%S%z", time.localtime(t0)),
        "wall_clock_seconds": time.time() - t0,
        "passed": passed,
        "results": results,
    }
    text = json.dumps(_jsonable(manifest), indent=2)
    name = manifest["command"].replace(" ", "_")
    write_atomic(args.out / f"{name}.json", text + "\n")
    print(json.dumps(_jsonable({"command": manifest["command"], "passed": passed, "results": results})))
    return EXIT_OK if passed else EXIT_TOLERANCE


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return _dispatch(argv)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as e:
        print(f"icelab: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
