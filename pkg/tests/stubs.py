"""Scripted local solvers for exercising the global loop."""

import numpy as np

from rfxy.local_solvers import CONVERGED, FAILED, LocalResult


class ScriptedSolver:
    """Returns energies from ``script`` in call order (repeating the last one)."""

    def __init__(self, script, failed_calls=()):
        self.script = list(script)
        self.failed_calls = set(failed_calls)
        self.calls = 0

    def __call__(self, x0, inst, opts):
        k = self.calls
        self.calls += 1
        e = self.script[min(k, len(self.script) - 1)]
        status = FAILED if k in self.failed_calls else CONVERGED
        if status == FAILED:
            e = float("nan")
        return LocalResult(config=np.array(x0), energy=e, grad_norm=0.0, iterations=0, status=status, solver="stub")


def identity_kick(theta, eta, rng):
    return np.array(theta)
