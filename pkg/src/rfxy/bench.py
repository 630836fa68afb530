"""Kernel timings for the angular and the Cartesian formulation."""

import gc
import time

import numpy as np

from .errors import ParameterError
from .manifold import project_tangent, random_point, random_tangent, retract, riemannian_hessian_vec
from .model import (
    energy_angular,
    energy_cartesian,
    euclidean_gradient,
    euclidean_hessian_vec,
    gradient_angular,
    hessian_vec_angular,
    to_angles,
)
from .rng import stream

ROWS = (
    "cost_angular",
    "cost_cartesian",
    "cost_cartesian_retraction",
    "egrad_angular",
    "egrad_cartesian",
    "rgrad",
    "ehess_angular",
    "ehess_cartesian",
    "rhess",
)


ROUND = 10


def _mean_times(kernels, repetitions):
    """Mean seconds per call, timing the kernels round-robin in short rounds.

    Interleaving spreads slow drifts of the host over all kernels instead of
    penalising whichever kernel happened to run during them.
    """
    for fn in kernels.values():
        fn()  # warm-up
    totals = dict.fromkeys(kernels, 0.0)
    enabled = gc.isenabled()
    gc.disable()
    try:
        done = 0
        while done < repetitions:
            n = min(ROUND, repetitions - done)
            for name, fn in kernels.items():
                t0 = time.perf_counter()
                for _ in range(n):
                    fn()
                totals[name] += time.perf_counter() - t0
            done += n
    finally:
        if enabled:
            gc.enable()
    return {name: totals[name] / repetitions for name in kernels}


def bench_kernels(inst, repetitions=100, seed=0):
    """Mean seconds per call of each kernel, keyed by the names in ``ROWS``.

    The Riemannian rows include the Euclidean work they need: ``rgrad`` is
    gradient plus projection, ``rhess`` is gradient plus Hessian-vector
    product plus curvature correction.  ``cost_cartesian_retraction`` times a
    retraction followed by the cost at the new point.
    """
    if repetitions < 100:
        raise ParameterError(f"repetitions must be at least 100, got {repetitions}")
    X = random_point(inst.lattice, seed=seed)
    theta = to_angles(X)
    rng = stream(seed, "local", 0)
    V = random_tangent(X, rng)
    v = rng.standard_normal(inst.n_sites)
    step = 1e-3 * V

    def rgrad():
        return project_tangent(X, euclidean_gradient(X, inst, check=False))

    def rhess():
        return riemannian_hessian_vec(X, V, inst, egrad=euclidean_gradient(X, inst, check=False), check=False)

    kernels = {
        "cost_angular": lambda: energy_angular(theta, inst),
        "cost_cartesian": lambda: energy_cartesian(X, inst, check=False),
        "cost_cartesian_retraction": lambda: energy_cartesian(retract(X, step), inst, check=False),
        "egrad_angular": lambda: gradient_angular(theta, inst),
        "egrad_cartesian": lambda: euclidean_gradient(X, inst, check=False),
        "rgrad": rgrad,
        "ehess_angular": lambda: hessian_vec_angular(theta, v, inst),
        "ehess_cartesian": lambda: euclidean_hessian_vec(V, inst),
        "rhess": rhess,
    }
    return _mean_times({name: kernels[name] for name in ROWS}, repetitions)


def format_table(timings):
    width = max(len(k) for k in timings)
    return "\n".join(f"{k:<{width}}  {v:.3e}" for k, v in timings.items())


def speedups(timings):
    return {
        "cost": timings["cost_angular"] / timings["cost_cartesian"],
        "gradient": timings["egrad_angular"] / timings["rgrad"],
        "hessian": timings["ehess_angular"] / timings["rhess"],
    }
