"""MultiStart and Monotonic Basin Hopping around a Riemannian local solver.

Random streams (see :mod:`rfxy.rng`), all derived from ``master_seed``:

* ``start``      -- the random start of MBH run ``i``
* ``perturb``    -- the perturbations of MBH run ``i``
* ``multistart`` -- the sequence of random starts of MultiStart run ``i``

so run ``i`` is reproducible on its own and runs may execute in any order.
"""

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .certificates import certify, relative_gap
from .errors import ParameterError
from .local_solvers import FAILED, SolverOptions, get_local_solver
from .manifold import random_point
from .model import _wrap, lower_bound, to_angles, to_cartesian
from .rng import check_seed, stream

logger = logging.getLogger(__name__)

THREADS_ENV = "RFXY_NUM_THREADS"
BUDGET_MODES = ("mbh_native", "ms_matched")
ETA_CONVENTIONS = ("std", "variance")


def default_workers():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class GlobalOptions:
    nr: int = 50
    mni: int = 15
    eta_max: float = 0.5
    # whether eta_max is the standard deviation or the variance of the kicks
    eta_convention: str = "std"
    local_solver: str = "rtr"
    local_opts: SolverOptions = field(default_factory=SolverOptions)
    master_seed: int = 0
    budget_mode: str = "ms_matched"
    epsilon: float = 0.1
    workers: int = field(default_factory=default_workers)

    def validate(self):
        if self.nr < 1 or self.mni < 1:
            raise ParameterError("nr and mni must be at least 1")
        if not self.eta_max > 0:
            raise ParameterError("eta_max must be positive")
        if self.eta_convention not in ETA_CONVENTIONS:
            raise ParameterError(f"eta_convention must be one of {ETA_CONVENTIONS}")
        if self.budget_mode not in BUDGET_MODES:
            raise ParameterError(f"budget_mode must be one of {BUDGET_MODES}")
        check_seed(self.master_seed)
        get_local_solver(self.local_solver)
        self.local_opts.validate()
        return self

    @property
    def eta_std(self):
        return self.eta_max if self.eta_convention == "std" else float(np.sqrt(self.eta_max))


@dataclass
class RunRecord:
    run: int
    local_searches: int
    best_energy: float
    wall_time: float
    accepted: int = 0
    failed_searches: int = 0
    # incumbent energy after the initial solve and after each acceptance
    incumbents: list = field(default_factory=list, repr=False)
    energies: list = field(default_factory=list, repr=False)

    def as_dict(self):
        return {
            "run": self.run,
            "local_searches": self.local_searches,
            "best_energy": self.best_energy,
            "wall_time": self.wall_time,
            "accepted": self.accepted,
            "failed_searches": self.failed_searches,
        }


@dataclass
class GlobalResult:
    method: str
    best_config: np.ndarray = field(repr=False)
    best_energy: float
    per_run_records: list = field(repr=False)
    total_local_searches: int
    total_wall_time: float
    certificate: dict = field(default_factory=dict)

    @property
    def run_counts(self):
        return [r.local_searches for r in self.per_run_records]


def perturb(theta, eta_max, rng):
    """Shift every angle by an independent N(0, eta_max^2) draw, wrapped to [0, 2 pi)."""
    theta = np.asarray(theta, dtype=np.float64)
    return _wrap(theta + eta_max * rng.standard_normal(theta.shape))


def _resolve(opts, local_solver):
    opts = (opts or GlobalOptions()).validate()
    solver = local_solver or get_local_solver(opts.local_solver)
    return opts, solver


def _solve(solver, x0, inst, local_opts):
    res = solver(x0, inst, local_opts)
    ok = not getattr(res, "failed", False) and np.isfinite(res.energy)
    return res, ok


def _mbh_run(i, inst, opts, solver, perturbation):
    """One outer MBH run: random start, then perturb/solve until MNI misses."""
    t0 = time.perf_counter()
    start_rng = stream(opts.master_seed, "start", i)
    kick_rng = stream(opts.master_seed, "perturb", i)
    x0 = random_point(inst.lattice, rng=start_rng)
    res, ok = _solve(solver, x0, inst, opts.local_opts)
    count, failed, accepted = 1, 0 if ok else 1, 0
    energies = [res.energy]
    if not ok:
        return RunRecord(i, count, np.inf, time.perf_counter() - t0, 0, failed, [], energies), None
    x, fx = res.config, res.energy
    incumbents = [fx]
    k = 0
    while k < opts.mni:
        theta = perturbation(to_angles(x), opts.eta_std, kick_rng)
        y_res, ok = _solve(solver, to_cartesian(theta), inst, opts.local_opts)
        count += 1
        energies.append(y_res.energy)
        if ok and y_res.energy < fx:
            x, fx = y_res.config, y_res.energy
            incumbents.append(fx)
            accepted += 1
            k = 0
        else:
            failed += 0 if ok else 1
            k += 1
    rec = RunRecord(i, count, fx, time.perf_counter() - t0, accepted, failed, incumbents, energies)
    return rec, x


def _ms_run(i, inst, opts, solver, budget):
    t0 = time.perf_counter()
    rng = stream(opts.master_seed, "multistart", i)
    best, best_x, failed = np.inf, None, 0
    energies = []
    for _ in range(budget):
        x0 = random_point(inst.lattice, rng=rng)
        res, ok = _solve(solver, x0, inst, opts.local_opts)
        energies.append(res.energy)
        if not ok:
            failed += 1
        elif res.energy < best:
            best, best_x = res.energy, res.config
    rec = RunRecord(i, budget, best, time.perf_counter() - t0, 0, failed, [], energies)
    return rec, best_x


def _mbh_task(args):
    i, inst, opts = args
    return _mbh_run(i, inst, opts, get_local_solver(opts.local_solver), perturb)


def _ms_task(args):
    i, inst, opts, budget = args
    return _ms_run(i, inst, opts, get_local_solver(opts.local_solver), budget)


def _collect(method, inst, opts, outcomes, t0):
    records = [rec for rec, _ in outcomes]
    best_energy, best_x = np.inf, None
    # reduce in run order so ties resolve to the lowest run index
    for rec, x in outcomes:
        if x is not None and rec.best_energy < best_energy:
            best_energy, best_x = rec.best_energy, x
    cert = {}
    if best_x is not None:
        c = certify(inst, opts.epsilon, best_energy=best_energy)
        cert = c.as_dict()
        cert["relative_gap"] = relative_gap(best_energy, inst)
        cert["lower_bound"] = lower_bound(inst)
    return GlobalResult(
        method=method,
        best_config=best_x,
        best_energy=float(best_energy),
        per_run_records=records,
        total_local_searches=sum(r.local_searches for r in records),
        total_wall_time=time.perf_counter() - t0,
        certificate=cert,
    )


def _run_all(task, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(task, jobs))
    return [task(job) for job in jobs]


def mbh(inst, opts=None, local_solver=None, perturbation=None):
    """Monotonic Basin Hopping embedded in ``opts.nr`` MultiStart runs.

    ``local_solver(x0, inst, local_opts)`` and
    ``perturbation(theta, eta, rng)`` may be injected; when either is given the
    runs execute serially.  A candidate replaces the incumbent only if its
    energy is strictly lower.
    """
    opts, solver = _resolve(opts, local_solver)
    t0 = time.perf_counter()
    if local_solver is None and perturbation is None:
        jobs = [(i, inst, opts) for i in range(opts.nr)]
        outcomes = _run_all(_mbh_task, jobs, opts.workers)
    else:
        kick = perturbation or perturb
        outcomes = [_mbh_run(i, inst, opts, solver, kick) for i in range(opts.nr)]
    result = _collect("mbh", inst, opts, outcomes, t0)
    logger.info(
        "mbh: best %.6f after %d local searches in %.2fs",
        result.best_energy, result.total_local_searches, result.total_wall_time,
    )
    return result


def multistart(inst, opts=None, budget=None, local_solver=None):
    """Independent local solves from fresh random starts.

    ``budget`` is either an integer (one run with that many solves) or a
    sequence of per-run counts, e.g. ``budget_report(mbh_result)``.  When it is
    omitted every one of the ``opts.nr`` runs gets ``opts.mni + 1`` solves, the
    fewest an MBH run can perform.
    """
    opts, solver = _resolve(opts, local_solver)
    if budget is None:
        counts = [opts.mni + 1] * opts.nr
    elif np.ndim(budget) == 0:
        counts = [int(budget)]
    else:
        counts = [int(b) for b in budget]
    if not counts or min(counts) < 1:
        raise ParameterError("every MultiStart run needs a budget of at least 1")
    t0 = time.perf_counter()
    if local_solver is None:
        jobs = [(i, inst, opts, b) for i, b in enumerate(counts)]
        outcomes = _run_all(_ms_task, jobs, opts.workers)
    else:
        outcomes = [_ms_run(i, inst, opts, solver, b) for i, b in enumerate(counts)]
    result = _collect("ms", inst, opts, outcomes, t0)
    logger.info(
        "ms: best %.6f after %d local searches in %.2fs",
        result.best_energy, result.total_local_searches, result.total_wall_time,
    )
    return result


def budget_report(mbh_result):
    """Local searches performed by each MBH run."""
    return list(mbh_result.run_counts)


def compare(inst, opts=None):
    """Run MBH, then MultiStart with the per-run budgets MBH consumed."""
    opts = (opts or GlobalOptions()).validate()
    mbh_res = mbh(inst, opts)
    if opts.budget_mode == "ms_matched":
        ms_res = multistart(inst, opts, budget=budget_report(mbh_res))
    else:
        ms_res = multistart(inst, opts)
    return mbh_res, ms_res
