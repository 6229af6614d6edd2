"""Experiment runner: reproduces the rank/bound/timing datasets as CSV.

Every subcommand emits rows in one fixed schema::

    experiment,n,eps,M,gamma,seed,s1_observed,s1_bound,storage_observed,
    storage_bound,residual,time_ms

Floats print with 17 significant digits and '.' decimals so downstream
plotting is language-neutral.  Rows are emitted in deterministic parameter
order; the worker pool size is capped by the ``TZ_THREADS`` environment
variable.  Observed-versus-bound violations abort the run with exit code 3
unless ``--no-assert`` is passed.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from tenzo import bounds as bnd
from tenzo import problems as prob
from tenzo.core import unfold
from tenzo.formats import numerical_rank, tt_svd
from tenzo.sylvester import (
    direct_kron_solve_3d,
    eigen_solve_3d,
    residual_3d,
    tt_sylvester_solve_3d,
)

CSV_COLUMNS = [
    "experiment",
    "n",
    "eps",
    "M",
    "gamma",
    "seed",
    "s1_observed",
    "s1_bound",
    "storage_observed",
    "storage_bound",
    "residual",
    "time_ms",
]


class BoundViolation(RuntimeError):
    pass


class NumericalFailure(RuntimeError):
    pass


@dataclass
class Record:
    experiment: str
    n: int | None = None
    eps: float | None = None
    m_param: float | None = None
    gamma: float | None = None
    seed: int | None = None
    s1_observed: int | None = None
    s1_bound: int | None = None
    storage_observed: int | None = None
    storage_bound: int | None = None
    residual: float | None = None
    time_ms: float | None = None

    def row(self) -> list[str]:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, (int, np.integer)):
                return str(int(v))
            if isinstance(v, float):
                return f"{v:.17g}"
            return str(v)

        return [
            self.experiment,
            fmt(self.n),
            fmt(self.eps),
            fmt(self.m_param),
            fmt(self.gamma),
            fmt(self.seed),
            fmt(self.s1_observed),
            fmt(self.s1_bound),
            fmt(self.storage_observed),
            fmt(self.storage_bound),
            fmt(self.residual),
            fmt(self.time_ms),
        ]


def _check_bound(rec: Record, no_assert: bool) -> None:
    if rec.s1_observed is None or rec.s1_bound is None or no_assert:
        return
    if rec.s1_observed > rec.s1_bound:
        raise BoundViolation(
            f"observed rank exceeds bound at {rec.experiment} "
            f"n={rec.n} eps={rec.eps} M={rec.m_param} gamma={rec.gamma}: "
            f"{rec.s1_observed} > {rec.s1_bound}"
        )


def _workers() -> int:
    raw = os.environ.get("TZ_THREADS", "")
    try:
        w = int(raw)
    except ValueError:
        w = 1
    return max(1, w)


def _run_points(points, fn):
    """Evaluate fn over points, preserving parameter order in the output."""
    w = _workers()
    if w == 1 or len(points) <= 1:
        return [fn(pt) for pt in points]
    with ThreadPoolExecutor(max_workers=min(w, len(points))) as pool:
        return list(pool.map(fn, points))


def _parse_eps_sweep(text: str) -> list[float]:
    """'1e-2:1e-10' -> decade sweep [1e-2, 1e-3, ..., 1e-10]."""
    if ":" not in text:
        return [float(text)]
    hi, lo = (float(t) for t in text.split(":", 1))
    if hi < lo:
        hi, lo = lo, hi
    out = []
    e = hi
    while e >= lo * (1.0 - 1e-12):
        out.append(e)
        e /= 10.0
    return out


def _parse_list(text: str, cast=float) -> list:
    return [cast(t) for t in text.split(",") if t.strip()]


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


def run_fourier_ratio(args) -> list[Record]:
    n = args.n if args.n else (600 if args.paper_scale else 120)
    if args.m_list:
        ms = _parse_list(args.m_list)
    elif args.m_min is not None and args.m_max is not None:
        step = args.m_step or max((args.m_max - args.m_min) / 9.0, 1.0)
        ms = list(np.arange(args.m_min, args.m_max + 0.5 * step, step))
    elif args.paper_scale:
        ms = list(np.arange(15.0, 151.0, 15.0))
    else:
        ms = [5.0, 10.0, 20.0, 30.0]
    eps = args.eps or 1e-10

    def point(m):
        t0 = time.perf_counter()
        x = prob.fourier_like(m, n)
        tt = tt_svd(x, eps)
        dt = (time.perf_counter() - t0) * 1e3
        return Record(
            experiment="fourier-ratio",
            n=n,
            eps=eps,
            m_param=float(m),
            seed=args.seed,
            s1_observed=tt.rank_vector[1],
            storage_observed=tt.storage_count(),
            time_ms=dt,
        )

    return _run_points(ms, point)


def run_gauss_bumps(args) -> list[Record]:
    n = args.n if args.n else (400 if args.paper_scale else 80)
    m_bumps = int(args.m) if args.m else (300 if args.paper_scale else 50)
    gammas = _parse_list(args.gamma_list) if args.gamma_list else (
        [10.0, 100.0, 1000.0] if args.paper_scale else [10.0, 100.0]
    )
    eps_list = _parse_eps_sweep(args.eps_sweep or "1e-2:1e-10")
    records = []
    for gamma in gammas:
        x = prob.gaussian_bumps(m_bumps, gamma, n, seed=args.seed)
        x1 = unfold(x, 1)
        nrm = x.norm()
        for eps in eps_list:
            t0 = time.perf_counter()
            s1 = max(1, numerical_rank(x1, eps * nrm / np.sqrt(3.0)))
            bound = bnd.gaussian_bump_bound(m_bumps, n, gamma, eps)
            dt = (time.perf_counter() - t0) * 1e3
            rec = Record(
                experiment="gauss-bumps",
                n=n,
                eps=eps,
                m_param=float(m_bumps),
                gamma=gamma,
                seed=args.seed,
                s1_observed=s1,
                s1_bound=bound.s1_bound,
                time_ms=dt,
            )
            _check_bound(rec, args.no_assert)
            records.append(rec)
    return records


def run_hilbert(args) -> list[Record]:
    n = args.n or 100
    eps_list = _parse_eps_sweep(args.eps_sweep or "1e-2:1e-13")
    x = prob.hilbert_tensor(n)

    def point(eps):
        t0 = time.perf_counter()
        tt = tt_svd(x, eps)
        dt = (time.perf_counter() - t0) * 1e3
        report = bnd.hilbert_tt_bound(n, eps)
        rec = Record(
            experiment="hilbert",
            n=n,
            eps=eps,
            seed=args.seed,
            s1_observed=tt.rank_vector[1],
            s1_bound=report.s1,
            storage_observed=tt.storage_count(),
            storage_bound=report.storage_bound,
            gamma=report.rho_or_gamma[0],
            time_ms=dt,
        )
        _check_bound(rec, args.no_assert)
        return rec

    return _run_points(eps_list, point)


def run_poisson_fd(args) -> list[Record]:
    ns = _parse_list(args.n_list, int) if args.n_list else (
        [10, 100, 500] if args.paper_scale else [8, 16, 32]
    )
    eps_list = _parse_eps_sweep(args.eps_sweep or "1e-2:1e-10")
    records = []
    for n in ns:
        problem = prob.fd_poisson(n)
        sol = eigen_solve_3d(problem, cap=2**27)
        resid = None
        if n <= 40:
            resid = residual_3d(problem, sol) / problem.rhs_norm()
        for eps in eps_list:
            t0 = time.perf_counter()
            tt = tt_svd(sol, eps)
            dt = (time.perf_counter() - t0) * 1e3
            report = bnd.fd_poisson_tt_bound(n, eps)
            rec = Record(
                experiment="poisson-fd",
                n=n,
                eps=eps,
                seed=args.seed,
                s1_observed=tt.rank_vector[1],
                s1_bound=report.s1,
                storage_observed=tt.storage_count(),
                storage_bound=report.storage_bound,
                gamma=report.rho_or_gamma[0],
                residual=resid,
                time_ms=dt,
            )
            _check_bound(rec, args.no_assert)
            records.append(rec)
    return records


def run_poisson_spectral(args) -> list[Record]:
    ns = _parse_list(args.n_list, int) if args.n_list else (
        [10, 100, 500] if args.paper_scale else [8, 16, 24]
    )
    eps_list = _parse_eps_sweep(args.eps_sweep or "1e-2:1e-10")
    records = []
    for n in ns:
        sp = prob.spectral_poisson(n)
        for eps in eps_list:
            t0 = time.perf_counter()
            tt = tt_sylvester_solve_3d(sp.problem, eps)
            dt = (time.perf_counter() - t0) * 1e3
            resid = None
            if n <= 32:
                resid = residual_3d(sp.problem, tt) / sp.problem.rhs_norm()
            report = bnd.spectral_poisson_tt_bound(n, eps)
            rec = Record(
                experiment="poisson-spectral",
                n=n,
                eps=eps,
                seed=args.seed,
                s1_observed=tt.rank_vector[1],
                s1_bound=report.s1,
                storage_observed=tt.storage_count(),
                storage_bound=report.storage_bound,
                gamma=report.rho_or_gamma[0],
                residual=resid,
                time_ms=dt,
            )
            _check_bound(rec, args.no_assert)
            records.append(rec)
    return records


def run_bench_solvers(args) -> list[Record]:
    if args.n_sweep:
        lo, hi = (int(t) for t in args.n_sweep.split(":", 1))
    else:
        lo, hi = (4, 1500) if args.paper_scale else (4, 256)
    ns = []
    n = max(4, lo)
    while n <= hi:
        ns.append(n)
        n *= 2
    solvers = _parse_list(args.solvers or "direct,eigen,fadi", str)
    eps = args.eps or 1e-8
    direct_max = args.direct_max_n or 16
    eigen_max = args.eigen_max_n or 256
    repeats = max(1, args.repeats or 1)
    records = []
    for n in ns:
        sp = prob.spectral_poisson(max(n, 4))
        for solver in solvers:
            if solver == "direct" and n > direct_max:
                continue
            if solver == "eigen" and n > eigen_max:
                continue
            best = None
            result = None
            for _ in range(repeats):
                t0 = time.perf_counter()
                if solver == "direct":
                    result = direct_kron_solve_3d(sp.problem)
                elif solver == "eigen":
                    result = eigen_solve_3d(sp.problem, cap=2**27)
                elif solver == "fadi":
                    result = tt_sylvester_solve_3d(sp.problem, eps)
                else:
                    raise NumericalFailure(f"unknown solver {solver!r} at n={n}")
                dt = (time.perf_counter() - t0) * 1e3
                best = dt if best is None else min(best, dt)
            resid = None
            if n <= 24:
                resid = residual_3d(sp.problem, result) / sp.problem.rhs_norm()
            rec = Record(
                experiment=f"bench-{solver}",
                n=n,
                eps=eps,
                seed=args.seed,
                s1_observed=(
                    result.rank_vector[1] if solver == "fadi" else None
                ),
                residual=resid,
                time_ms=best,
            )
            records.append(rec)
    return records


def run_bound_calc(args) -> list[Record]:
    eps_list = _parse_eps_sweep(args.eps_sweep or (str(args.eps) if args.eps else "1e-8"))
    family = args.family
    records = []
    for eps in eps_list:
        if family == "hilbert":
            report = bnd.hilbert_tt_bound(args.n or 100, eps)
            n = args.n or 100
        elif family == "poisson-fd":
            report = bnd.fd_poisson_tt_bound(args.n or 100, eps)
            n = args.n or 100
        elif family == "poisson-spectral":
            report = bnd.spectral_poisson_tt_bound(args.n or 100, eps)
            n = args.n or 100
        elif family == "interval":
            if args.a is None or args.b is None:
                raise NumericalFailure("interval family needs --a and --b")
            extents = _parse_list(args.extents, int) if args.extents else [args.n or 100] * 3
            nu = _parse_list(args.nu, int) if args.nu else [1] * (len(extents) - 1)
            sets = [bnd.SpectralSet.interval(args.a, args.b)] * len(extents)
            report = bnd.tt_storage_bound(sets, nu, extents, eps)
            n = extents[0]
        elif family == "disk":
            if args.z0 is None or args.eta is None:
                raise NumericalFailure("disk family needs --z0 and --eta")
            extents = _parse_list(args.extents, int) if args.extents else [args.n or 100] * 3
            nu = _parse_list(args.nu, int) if args.nu else [1] * (len(extents) - 1)
            sets = [bnd.SpectralSet.disk(args.z0, args.eta)] * len(extents)
            report = bnd.tt_storage_bound(sets, nu, extents, eps)
            n = extents[0]
        else:
            raise NumericalFailure(f"unknown bound family {family!r}")
        records.append(
            Record(
                experiment=f"bound-{family}",
                n=n,
                eps=eps,
                seed=args.seed,
                s1_bound=report.s1,
                storage_bound=report.storage_bound,
                gamma=report.rho_or_gamma[0],
                time_ms=0.0,
            )
        )
    return records


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------


def _add_common(sp):
    sp.add_argument("--output", default=None, help="CSV path (default: stdout)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--paper-scale", action="store_true",
                    help="use the published experiment sizes instead of desk scale")
    sp.add_argument("--no-assert", action="store_true",
                    help="do not fail when an observed rank exceeds its bound")
    sp.add_argument("--eps", type=float, default=None)
    sp.add_argument("--eps-sweep", default=None, help="decade sweep, e.g. 1e-2:1e-10")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tenzo", description="low-rank tensor compressibility experiments"
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("fourier-ratio", help="rank ratio of the oscillatory sampler")
    _add_common(sp)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--m-list", default=None)
    sp.add_argument("--m-min", type=float, default=None)
    sp.add_argument("--m-max", type=float, default=None)
    sp.add_argument("--m-step", type=float, default=None)
    sp.set_defaults(runner=run_fourier_ratio)

    sp = sub.add_parser("gauss-bumps", help="Gaussian bump ranks vs. bounds")
    _add_common(sp)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--m", type=int, default=None, help="number of bumps")
    sp.add_argument("--gamma-list", default=None)
    sp.set_defaults(runner=run_gauss_bumps)

    sp = sub.add_parser("hilbert", help="Hilbert tensor compression vs. bounds")
    _add_common(sp)
    sp.add_argument("--n", type=int, default=None)
    sp.set_defaults(runner=run_hilbert)

    sp = sub.add_parser("poisson-fd", help="finite-difference Poisson ranks")
    _add_common(sp)
    sp.add_argument("--n-list", default=None)
    sp.set_defaults(runner=run_poisson_fd)

    sp = sub.add_parser("poisson-spectral", help="spectral Poisson ranks")
    _add_common(sp)
    sp.add_argument("--n-list", default=None)
    sp.set_defaults(runner=run_poisson_spectral)

    sp = sub.add_parser("bench-solvers", help="solver timing race")
    _add_common(sp)
    sp.add_argument("--n-sweep", default=None, help="min:max, doubling grid")
    sp.add_argument("--solvers", default=None, help="comma list of direct,eigen,fadi")
    sp.add_argument("--direct-max-n", type=int, default=None)
    sp.add_argument("--eigen-max-n", type=int, default=None)
    sp.add_argument("--repeats", type=int, default=None)
    sp.set_defaults(runner=run_bench_solvers)

    sp = sub.add_parser("bound-calc", help="evaluate bounds without experiments")
    _add_common(sp)
    sp.add_argument("--family", required=True,
                    choices=["hilbert", "poisson-fd", "poisson-spectral", "interval", "disk"])
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--a", type=float, default=None)
    sp.add_argument("--b", type=float, default=None)
    sp.add_argument("--z0", type=float, default=None)
    sp.add_argument("--eta", type=float, default=None)
    sp.add_argument("--nu", default=None, help="comma list of unfolding ranks")
    sp.add_argument("--extents", default=None, help="comma list of extents")
    sp.set_defaults(runner=run_bound_calc)

    return ap


def _write_csv(records, output) -> None:
    def dump(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rec in records:
            w.writerow(rec.row())

    if output:
        with open(output, "w", newline="") as fh:
            dump(fh)
    else:
        dump(sys.stdout)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        records = args.runner(args)
    except (BoundViolation, NumericalFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    _write_csv(records, args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
